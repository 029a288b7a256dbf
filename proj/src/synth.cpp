#include "mk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mk/rng.hpp"

namespace mk {

void validate_spec(const SynthSpec& spec) {
    if (spec.classes < 2)
        throw std::invalid_argument("synthetic benchmark needs at least 2 classes");
    if (spec.per_class < 2)
        throw std::invalid_argument("need at least 2 samples per class");
    if (spec.width < 8 || spec.height < 8)
        throw std::invalid_argument("image dimensions must be at least 8x8");
    if (!(spec.jitter_px >= 0.0) ||
        spec.jitter_px >= std::min(spec.width, spec.height) / 4.0)
        throw std::invalid_argument("jitter must satisfy 0 <= jitter < min(w,h)/4");
    if (!(spec.noise_sigma >= 0.0))
        throw std::invalid_argument("noise sigma must be nonnegative");
    if (std::ssize(spec.blob_counts) != spec.classes)
        throw std::invalid_argument("blob_counts needs one entry per class");
    for (int n : spec.blob_counts)
        if (n < 1) throw std::invalid_argument("every class needs at least one blob");
    if (!(spec.blob_sigma > 0.0) || !(spec.template_mass > 0.0))
        throw std::invalid_argument("blob sigma and template mass must be positive");
}

namespace {

struct Blob {
    double cx, cy, amplitude;
};

// Blob centers sit on an ellipse well inside the frame, with a class-specific
// phase, so classes differ in mass layout while sharing the total mass.
std::vector<Blob> class_template(const SynthSpec& spec, int class_index) {
    const int count = spec.blob_counts[class_index];
    const double cx = (spec.width - 1) / 2.0;
    const double cy = (spec.height - 1) / 2.0;
    const double rx = 0.30 * (spec.width - 1);
    const double ry = 0.28 * (spec.height - 1);
    const double phase = 0.9 * class_index;
    const double two_pi = 6.283185307179586476925287;

    // Each Gaussian blob integrates to template_mass / count.
    const double sigma2 = spec.blob_sigma * spec.blob_sigma;
    const double amplitude = spec.template_mass / (count * two_pi * sigma2);

    std::vector<Blob> blobs;
    blobs.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double theta = phase + two_pi * k / count;
        blobs.push_back({cx + rx * std::cos(theta), cy + ry * std::sin(theta),
                         amplitude});
    }
    return blobs;
}

}  // namespace

GrayImage render_item(const SynthSpec& spec, int class_index, int sample_index) {
    const auto blobs = class_template(spec, class_index);
    std::mt19937_64 rng(mix_seed(
        spec.seed, std::uint64_t(class_index) * spec.per_class + sample_index));
    const double dx = uniform_in(rng, -spec.jitter_px, spec.jitter_px);
    const double dy = uniform_in(rng, -spec.jitter_px, spec.jitter_px);

    GrayImage image;
    image.width = spec.width;
    image.height = spec.height;
    image.intensities.assign(std::size_t(spec.width) * spec.height, 0.0);

    const double inv_two_sigma2 = 1.0 / (2.0 * spec.blob_sigma * spec.blob_sigma);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            double v = 0.0;
            for (const auto& blob : blobs) {
                const double ddx = x - (blob.cx + dx);
                const double ddy = y - (blob.cy + dy);
                v += blob.amplitude *
                     std::exp(-(ddx * ddx + ddy * ddy) * inv_two_sigma2);
            }
            if (spec.noise_sigma > 0.0)
                v += std::abs(spec.noise_sigma * standard_normal(rng));
            image.intensities[std::size_t(y) * spec.width + x] =
                std::clamp(v, 0.0, 1.0);
        }
    return image;
}

LabeledDataset generate(const SynthSpec& spec) {
    validate_spec(spec);

    LabeledDataset data;
    for (int c = 0; c < spec.classes; ++c)
        data.classes.push_back("class" + std::to_string(c));

    char id[64];
    for (int c = 0; c < spec.classes; ++c)
        for (int s = 0; s < spec.per_class; ++s) {
            std::snprintf(id, sizeof id, "class%d_%03d", c, s);
            const GrayImage image = render_item(spec, c, s);
            data.items.push_back(
                {id, to_distribution(image, 1.0, false), data.classes[c]});
        }
    return data;
}

void write_dataset(const SynthSpec& spec, const std::filesystem::path& dir) {
    validate_spec(spec);
    std::filesystem::create_directories(dir);

    std::vector<std::pair<std::string, std::string>> labels;
    char id[64];
    for (int c = 0; c < spec.classes; ++c)
        for (int s = 0; s < spec.per_class; ++s) {
            std::snprintf(id, sizeof id, "class%d_%03d", c, s);
            save_pgm(render_item(spec, c, s), dir / (std::string(id) + ".pgm"));
            labels.emplace_back(id, "class" + std::to_string(c));
        }
    save_labels_csv(dir / "labels.csv", labels);
}

}  // namespace mk
