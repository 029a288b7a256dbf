#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mk/distributions.hpp"

namespace mk {

struct LabeledItem {
    std::string id;
    MassDistribution distribution;
    std::string label;
};

struct LabeledDataset {
    std::vector<LabeledItem> items;
    std::vector<std::string> classes;  // distinct labels, in first-seen order

    std::vector<std::string> labels() const;
};

/// Checks id uniqueness, label membership and >= 2 items per class.
void validate_dataset(const LabeledDataset& data);

struct DistanceMatrix {
    int n = 0;
    std::vector<double> values;  // n x n, symmetric, zero diagonal
    std::string metric_tag;

    double at(int i, int j) const { return values[std::size_t(i) * n + j]; }
    double& at(int i, int j) { return values[std::size_t(i) * n + j]; }
};

enum class MetricKind { mk, l2 };

struct MetricSpec {
    MetricKind kind = MetricKind::mk;
    double kappa = 1.0;
    double p = 1.0;
    std::int64_t resolution = 100000;

    std::string tag() const;  // e.g. "mk:kappa=16:p=1" or "l2"
};

/// Pairwise distances over the dataset; the n(n-1)/2 upper-triangle solves
/// are distributed over `workers` threads. Output is deterministic and
/// independent of the worker count.
DistanceMatrix distance_matrix(const LabeledDataset& data,
                               const MetricSpec& metric, int workers = 1);

/// Per class, floor(count * train_fraction) indices drawn uniformly without
/// replacement into train; the rest go to test. Throws when any class would
/// get an empty training set.
std::pair<std::vector<int>, std::vector<int>> stratified_split(
    std::span<const std::string> labels, double train_fraction,
    std::mt19937_64& rng);

/// Nearest-neighbor prediction for each test index; equidistant neighbors
/// resolve to the lowest training index.
std::vector<std::string> nn_classify(const DistanceMatrix& matrix,
                                     std::span<const std::string> labels,
                                     std::span<const int> train,
                                     std::span<const int> test);

struct ClassificationReport {
    int repeats = 0;
    std::vector<double> per_repeat_error;
    double mean_error = 0.0;
    double ci_low = 0.0;   // empirical 5th percentile
    double ci_high = 0.0;  // empirical 95th percentile
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
};

/// Repeated stratified splits with counter-based per-repeat sub-seeds;
/// error = mislabeled / test count.
ClassificationReport evaluate(const DistanceMatrix& matrix,
                              std::span<const std::string> labels,
                              double train_fraction, int repeats,
                              std::uint64_t seed);

struct SweepRow {
    std::string metric_tag;
    double kappa = 0.0;  // unused for the l2 row
    bool is_l2 = false;
    double mean_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// One distance matrix + evaluation per kappa, plus the l2 baseline row.
std::vector<SweepRow> kappa_sweep(const LabeledDataset& data,
                                  std::span<const double> kappas, double p,
                                  std::int64_t resolution,
                                  double train_fraction, int repeats,
                                  std::uint64_t seed, int workers = 1);

// --- persistence ---------------------------------------------------------

/// CSV with a `# metric=<tag> n=<n>` header line and 17-significant-digit
/// values.
void save_distance_matrix_csv(const std::filesystem::path& path,
                              const DistanceMatrix& matrix);
DistanceMatrix load_distance_matrix_csv(const std::filesystem::path& path);

/// `id,label` header plus one row per item.
void save_labels_csv(const std::filesystem::path& path,
                     std::span<const std::pair<std::string, std::string>> rows);
std::vector<std::pair<std::string, std::string>> load_labels_csv(
    const std::filesystem::path& path);

void save_report_csv(const std::filesystem::path& path,
                     const ClassificationReport& report);

}  // namespace mk
