#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mk/distributions.hpp"

namespace mk {

/// Grayscale image with intensities in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> intensities;

    double at(int x, int y) const { return intensities[std::size_t(y) * width + x]; }
};

/// Thrown on malformed PGM input; `offset` is the byte position of the
/// problem in the file.
class PgmFormatError : public std::runtime_error {
public:
    PgmFormatError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Reads P2 or P5 PGM with maxval <= 65535 (16-bit rasters are big-endian);
/// intensities are normalized by maxval.
GrayImage load_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::vector<unsigned char>& bytes);

/// Writes binary P5 with maxval 255, rounding half-up.
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Separable bicubic resampling over the nearest 4x4 neighborhood with a
/// Keys cubic kernel (Catmull-Rom at a = -0.5), replicated borders, output
/// clamped to [0, 1].
GrayImage downsample_bicubic(const GrayImage& image, int new_width,
                             int new_height, double a = -0.5);

/// Kernel weight at offset t (|t| < 2) for the Keys cubic family.
double cubic_kernel(double t, double a = -0.5);

/// Intensities become mass entries verbatim; with normalize the result has
/// unit total mass (all-zero images stay zero).
MassDistribution to_distribution(const GrayImage& image, double spacing = 1.0,
                                 bool normalize = false);

/// Euclidean norm of the entry-wise difference; requires a shared grid.
double l2_distance(const MassDistribution& f0, const MassDistribution& f1);

}  // namespace mk
