#include "mk/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace mk {

PgmFormatError::PgmFormatError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

namespace {

struct Cursor {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;

    bool done() const { return pos >= bytes.size(); }
    unsigned char peek() const { return bytes[pos]; }

    void skip_space_and_comments() {
        while (!done()) {
            if (std::isspace(peek())) {
                ++pos;
            } else if (peek() == '#') {
                while (!done() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    long read_int(const char* what) {
        skip_space_and_comments();
        if (done() || !std::isdigit(peek()))
            throw PgmFormatError(std::string("expected ") + what, pos);
        long value = 0;
        while (!done() && std::isdigit(peek())) {
            value = value * 10 + (peek() - '0');
            if (value > 1'000'000'000L)
                throw PgmFormatError(std::string(what) + " is out of range", pos);
            ++pos;
        }
        return value;
    }
};

}  // namespace

GrayImage parse_pgm(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw PgmFormatError("not a P2/P5 PGM file", 0);
    const bool binary = bytes[1] == '5';

    Cursor cur{bytes, 2};
    const long width = cur.read_int("width");
    const long height = cur.read_int("height");
    const long maxval = cur.read_int("maxval");
    if (width < 1 || height < 1)
        throw PgmFormatError("image dimensions must be positive", cur.pos);
    if (maxval < 1 || maxval > 65535)
        throw PgmFormatError("maxval must be in [1, 65535]", cur.pos);

    GrayImage image;
    image.width = int(width);
    image.height = int(height);
    const std::size_t count = std::size_t(width) * std::size_t(height);
    image.intensities.resize(count);

    if (binary) {
        if (cur.done() || !std::isspace(cur.peek()))
            throw PgmFormatError("expected whitespace before raster", cur.pos);
        ++cur.pos;
        const int bytes_per_sample = maxval > 255 ? 2 : 1;
        if (bytes.size() - cur.pos < count * bytes_per_sample)
            throw PgmFormatError("raster is truncated", bytes.size());
        for (std::size_t i = 0; i < count; ++i) {
            long v;
            if (bytes_per_sample == 2) {
                v = long(bytes[cur.pos]) << 8 | bytes[cur.pos + 1];  // big-endian
                cur.pos += 2;
            } else {
                v = bytes[cur.pos++];
            }
            if (v > maxval)
                throw PgmFormatError("sample exceeds maxval", cur.pos - bytes_per_sample);
            image.intensities[i] = double(v) / double(maxval);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = cur.read_int("sample");
            if (v > maxval)
                throw PgmFormatError("sample exceeds maxval", cur.pos);
            image.intensities[i] = double(v) / double(maxval);
        }
    }
    return image;
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>()};
    return parse_pgm(bytes);
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    for (double v : image.intensities) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        const int level = int(std::floor(clamped * 255.0 + 0.5));
        out.put(char(std::clamp(level, 0, 255)));
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

double cubic_kernel(double t, double a) {
    const double x = std::abs(t);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return a * (((x - 5.0) * x + 8.0) * x - 4.0);
    return 0.0;
}

GrayImage downsample_bicubic(const GrayImage& image, int new_width,
                             int new_height, double a) {
    if (new_width < 1 || new_height < 1)
        throw std::invalid_argument("target dimensions must be at least 1x1");

    GrayImage out;
    out.width = new_width;
    out.height = new_height;
    out.intensities.resize(std::size_t(new_width) * new_height);

    const double scale_x = double(image.width) / new_width;
    const double scale_y = double(image.height) / new_height;
    auto clamp_x = [&](int x) { return std::clamp(x, 0, image.width - 1); };
    auto clamp_y = [&](int y) { return std::clamp(y, 0, image.height - 1); };

    for (int oy = 0; oy < new_height; ++oy) {
        const double sy = (oy + 0.5) * scale_y - 0.5;
        const int by = int(std::floor(sy));
        double wy[4];
        for (int m = 0; m < 4; ++m) wy[m] = cubic_kernel(sy - (by - 1 + m), a);

        for (int ox = 0; ox < new_width; ++ox) {
            const double sx = (ox + 0.5) * scale_x - 0.5;
            const int bx = int(std::floor(sx));
            double wx[4];
            for (int m = 0; m < 4; ++m) wx[m] = cubic_kernel(sx - (bx - 1 + m), a);

            double acc = 0.0;
            for (int m = 0; m < 4; ++m) {
                const int yy = clamp_y(by - 1 + m);
                double row = 0.0;
                for (int k = 0; k < 4; ++k)
                    row += wx[k] * image.at(clamp_x(bx - 1 + k), yy);
                acc += wy[m] * row;
            }
            out.intensities[std::size_t(oy) * new_width + ox] =
                std::clamp(acc, 0.0, 1.0);
        }
    }
    return out;
}

MassDistribution to_distribution(const GrayImage& image, double spacing,
                                 bool normalize) {
    MassDistribution f;
    f.grid = {image.width, image.height, spacing};
    f.mass = image.intensities;
    if (normalize) {
        const double total = total_mass(f);
        if (total > 0.0)
            for (double& v : f.mass) v /= total;
    }
    return f;
}

double l2_distance(const MassDistribution& f0, const MassDistribution& f1) {
    if (!(f0.grid == f1.grid))
        throw std::invalid_argument("l2_distance requires a shared grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < f0.mass.size(); ++i) {
        const double d = f0.mass[i] - f1.mass[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace mk
