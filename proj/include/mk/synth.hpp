#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mk/classify.hpp"
#include "mk/imaging.hpp"

namespace mk {

/// Synthetic labeled benchmark: each class is a fixed template of Gaussian
/// blobs (equal total mass across classes, distinct layouts); samples are
/// rigid translations of the template by uniform jitter plus half-normal
/// pixel noise, clamped to [0, 1].
struct SynthSpec {
    int classes = 3;
    int per_class = 60;
    int width = 29;
    int height = 24;
    double jitter_px = 2.0;
    double noise_sigma = 0.05;
    std::vector<int> blob_counts = {2, 3, 4};  // one entry per class
    double blob_sigma = 1.3;                   // Gaussian footprint, pixels
    double template_mass = 8.0;                // shared by every class
    std::uint64_t seed = 42;
};

/// Checks dimensions, jitter_px < min(width, height) / 4, noise_sigma >= 0,
/// classes >= 2 and blob_counts size.
void validate_spec(const SynthSpec& spec);

/// Deterministic under spec.seed; per-item sub-seeds are counter-based so
/// generation order never matters. Class labels are "class0", "class1", ...
LabeledDataset generate(const SynthSpec& spec);

/// Renders one item as a GrayImage (the dataset keeps distributions).
GrayImage render_item(const SynthSpec& spec, int class_index, int sample_index);

/// Writes `<class>_<index>.pgm` files plus labels.csv into dir.
void write_dataset(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace mk
