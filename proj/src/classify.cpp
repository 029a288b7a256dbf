#include "mk/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mk/imaging.hpp"
#include "mk/rng.hpp"
#include "mk/transport.hpp"

namespace mk {

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double percentile(std::vector<double> sorted, double q) {
    const double pos = q * double(sorted.size() - 1);
    const std::size_t lo = std::size_t(std::floor(pos));
    const double frac = pos - double(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

std::vector<std::string> LabeledDataset::labels() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.label);
    return out;
}

void validate_dataset(const LabeledDataset& data) {
    std::set<std::string> ids;
    std::map<std::string, int> per_class;
    const std::set<std::string> classes(data.classes.begin(), data.classes.end());
    for (const auto& item : data.items) {
        if (!ids.insert(item.id).second)
            throw std::invalid_argument("duplicate item id: " + item.id);
        if (!classes.count(item.label))
            throw std::invalid_argument("label not in class list: " + item.label);
        ++per_class[item.label];
    }
    for (const auto& name : data.classes)
        if (per_class[name] < 2)
            throw std::invalid_argument("class " + name +
                                        " needs at least 2 items for splitting");
}

std::string MetricSpec::tag() const {
    if (kind == MetricKind::l2) return "l2";
    return "mk:kappa=" + format_number(kappa) + ":p=" + format_number(p);
}

DistanceMatrix distance_matrix(const LabeledDataset& data,
                               const MetricSpec& metric, int workers) {
    if (workers < 1) throw std::invalid_argument("worker count must be positive");
    const int n = std::ssize(data.items);
    for (const auto& item : data.items)
        if (!(item.distribution.grid == data.items[0].distribution.grid))
            throw std::invalid_argument("all items must share one grid");

    DistanceMatrix matrix;
    matrix.n = n;
    matrix.metric_tag = metric.tag();
    matrix.values.assign(std::size_t(n) * n, 0.0);
    if (n < 2) return matrix;

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(std::size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    const GroundCost cost{data.items[0].distribution.grid,
                          data.items[0].distribution.grid, metric.p};
    auto pair_distance = [&](int i, int j) {
        const auto& a = data.items[i].distribution;
        const auto& b = data.items[j].distribution;
        if (metric.kind == MetricKind::l2) return l2_distance(a, b);
        return unbalanced_distance(a, b, cost, metric.kappa, metric.resolution).value;
    };

    // Each worker pulls the next pair index; every cell is written exactly
    // once, so the result cannot depend on scheduling.
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t k = next.fetch_add(1); k < pairs.size();
             k = next.fetch_add(1)) {
            const auto [i, j] = pairs[k];
            const double d = pair_distance(i, j);
            matrix.at(i, j) = d;
            matrix.at(j, i) = d;
        }
    };

    const int thread_count = std::min<std::size_t>(workers, pairs.size());
    if (thread_count <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    return matrix;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(
    std::span<const std::string> labels, double train_fraction,
    std::mt19937_64& rng) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw std::invalid_argument("train fraction must lie strictly in (0, 1)");

    std::vector<std::string> classes;
    std::map<std::string, std::vector<int>> members;
    for (int i = 0; i < std::ssize(labels); ++i) {
        auto [it, inserted] = members.try_emplace(std::string(labels[i]));
        if (inserted) classes.push_back(labels[i]);
        it->second.push_back(i);
    }

    std::vector<int> train, test;
    for (const auto& name : classes) {
        auto& idx = members[name];
        // The tiny offset keeps exact fractions like 1/3 of 120 at their
        // intended integer count despite binary representation noise.
        const int take = int(std::floor(train_fraction * double(idx.size()) + 1e-9));
        if (take < 1)
            throw std::invalid_argument("train fraction leaves class " + name +
                                        " without training items");
        for (int i = 0; i < take; ++i) {
            const auto j = i + int(uniform_index(rng, idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        train.insert(train.end(), idx.begin(), idx.begin() + take);
        test.insert(test.end(), idx.begin() + take, idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::vector<std::string> nn_classify(const DistanceMatrix& matrix,
                                     std::span<const std::string> labels,
                                     std::span<const int> train,
                                     std::span<const int> test) {
    if (train.empty()) throw std::invalid_argument("training set is empty");
    std::vector<char> seen(matrix.n, 0);
    for (int i : train) {
        if (i < 0 || i >= matrix.n) throw std::invalid_argument("train index out of range");
        seen[i] = 1;
    }
    for (int i : test) {
        if (i < 0 || i >= matrix.n) throw std::invalid_argument("test index out of range");
        if (seen[i]) throw std::invalid_argument("train and test indices overlap");
    }

    std::vector<std::string> predictions;
    predictions.reserve(test.size());
    for (int t : test) {
        int best = train[0];
        double best_d = matrix.at(t, best);
        for (int i : train) {
            const double d = matrix.at(t, i);
            if (d < best_d) {  // ties keep the lowest training index
                best_d = d;
                best = i;
            }
        }
        predictions.push_back(std::string(labels[best]));
    }
    return predictions;
}

ClassificationReport evaluate(const DistanceMatrix& matrix,
                              std::span<const std::string> labels,
                              double train_fraction, int repeats,
                              std::uint64_t seed) {
    if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
    if (std::ssize(labels) != matrix.n)
        throw std::invalid_argument("label count does not match matrix size");

    ClassificationReport report;
    report.repeats = repeats;
    report.seed = seed;
    report.train_fraction = train_fraction;
    report.per_repeat_error.reserve(repeats);

    for (int r = 0; r < repeats; ++r) {
        std::mt19937_64 rng(mix_seed(seed, std::uint64_t(r)));
        const auto [train, test] = stratified_split(labels, train_fraction, rng);
        const auto predicted = nn_classify(matrix, labels, train, test);
        int wrong = 0;
        for (std::size_t i = 0; i < test.size(); ++i)
            if (predicted[i] != labels[test[i]]) ++wrong;
        report.per_repeat_error.push_back(double(wrong) / double(test.size()));
    }

    double sum = 0.0;
    for (double e : report.per_repeat_error) sum += e;
    report.mean_error = sum / double(repeats);
    std::vector<double> sorted = report.per_repeat_error;
    std::sort(sorted.begin(), sorted.end());
    report.ci_low = percentile(sorted, 0.05);
    report.ci_high = percentile(sorted, 0.95);
    return report;
}

std::vector<SweepRow> kappa_sweep(const LabeledDataset& data,
                                  std::span<const double> kappas, double p,
                                  std::int64_t resolution,
                                  double train_fraction, int repeats,
                                  std::uint64_t seed, int workers) {
    if (kappas.empty()) throw std::invalid_argument("kappa list must be nonempty");
    const auto labels = data.labels();

    std::vector<SweepRow> rows;
    for (double kappa : kappas) {
        const MetricSpec spec{MetricKind::mk, kappa, p, resolution};
        const auto matrix = distance_matrix(data, spec, workers);
        const auto report = evaluate(matrix, labels, train_fraction, repeats, seed);
        rows.push_back({matrix.metric_tag, kappa, false, report.mean_error,
                        report.ci_low, report.ci_high});
    }
    const MetricSpec l2spec{MetricKind::l2, 0.0, p, resolution};
    const auto matrix = distance_matrix(data, l2spec, workers);
    const auto report = evaluate(matrix, labels, train_fraction, repeats, seed);
    rows.push_back({matrix.metric_tag, 0.0, true, report.mean_error, report.ci_low,
                    report.ci_high});
    return rows;
}

// --- persistence -----------------------------------------------------------

void save_distance_matrix_csv(const std::filesystem::path& path,
                              const DistanceMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# metric=" << matrix.metric_tag << " n=" << matrix.n << '\n';
    for (int i = 0; i < matrix.n; ++i) {
        for (int j = 0; j < matrix.n; ++j) {
            if (j) out << ',';
            out << format_full(matrix.at(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

DistanceMatrix load_distance_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    const auto metric_pos = header.find("metric=");
    const auto n_pos = header.find(" n=");
    if (header.rfind("# ", 0) != 0 || metric_pos == std::string::npos ||
        n_pos == std::string::npos)
        throw std::runtime_error(path.string() + ": missing matrix header line");

    DistanceMatrix matrix;
    matrix.metric_tag = header.substr(metric_pos + 7, n_pos - (metric_pos + 7));
    matrix.n = std::stoi(header.substr(n_pos + 3));
    if (matrix.n < 0) throw std::runtime_error(path.string() + ": bad matrix size");
    matrix.values.reserve(std::size_t(matrix.n) * matrix.n);

    std::string line;
    for (int i = 0; i < matrix.n; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error(path.string() + ": truncated matrix");
        std::stringstream row(line);
        std::string cell;
        for (int j = 0; j < matrix.n; ++j) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error(path.string() + ": short row " +
                                         std::to_string(i));
            matrix.values.push_back(std::stod(cell));
        }
    }
    return matrix;
}

void save_labels_csv(const std::filesystem::path& path,
                     std::span<const std::pair<std::string, std::string>> rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "id,label\n";
    for (const auto& [id, label] : rows) out << id << ',' << label << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::pair<std::string, std::string>> load_labels_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,label", 0) != 0)
        throw std::runtime_error(path.string() + ": expected 'id,label' header");
    std::vector<std::pair<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed label row: " + line);
        rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return rows;
}

void save_report_csv(const std::filesystem::path& path,
                     const ClassificationReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# seed=" << report.seed << " train_fraction=" << format_number(report.train_fraction)
        << " repeats=" << report.repeats << " mean=" << format_full(report.mean_error)
        << " ci_low=" << format_full(report.ci_low)
        << " ci_high=" << format_full(report.ci_high) << '\n';
    out << "repeat,error\n";
    for (int r = 0; r < report.repeats; ++r)
        out << r << ',' << format_full(report.per_repeat_error[r]) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mk
