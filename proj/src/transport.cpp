#include "mk/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mk {

EdgePredicate prune_edges(const GroundCost& c, double kappa) {
    if (!(kappa >= 0.0))
        throw std::invalid_argument("prune_edges requires kappa >= 0");
    return EdgePredicate{&c, kappa};
}

FlowNetwork build_transport_network(const QuantizedDistribution& f0,
                                    const QuantizedDistribution& f1,
                                    const GroundCost& c, double kappa,
                                    WEdgeMode mode) {
    if (f0.unit_size != f1.unit_size)
        throw std::invalid_argument(
            "transport network requires a shared quantization unit; re-quantize jointly");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("transport network requires kappa >= 0");

    const int k0 = f0.grid.size();
    const int k1 = f1.grid.size();
    const std::int32_t w = k0 + k1;

    FlowNetwork net;
    net.node_count = k0 + k1 + 1;
    net.supply.resize(net.node_count);
    std::int64_t t0 = 0, t1 = 0;
    for (int i = 0; i < k0; ++i) {
        net.supply[i] = f0.units[i];
        t0 += f0.units[i];
    }
    for (int j = 0; j < k1; ++j) {
        net.supply[k0 + j] = -f1.units[j];
        t1 += f1.units[j];
    }
    net.supply[w] = t1 - t0;

    const double threshold = 2.0 * kappa;
    net.edges.reserve(std::size_t(k0) * k1 / 4 + k0 + k1);
    for (std::int32_t i = 0; i < k0; ++i)
        for (std::int32_t j = 0; j < k1; ++j) {
            const double cost = c(i, j);
            if (cost <= threshold)
                net.edges.push_back({i, std::int32_t(k0 + j), cost});
        }
    for (std::int32_t i = 0; i < k0; ++i) net.edges.push_back({i, w, kappa});
    for (std::int32_t j = 0; j < k1; ++j)
        net.edges.push_back({w, std::int32_t(k0 + j), kappa});
    if (mode == WEdgeMode::bidirectional) {
        for (std::int32_t i = 0; i < k0; ++i) net.edges.push_back({w, i, kappa});
        for (std::int32_t j = 0; j < k1; ++j)
            net.edges.push_back({std::int32_t(k0 + j), w, kappa});
    }
    return net;
}

namespace {

struct Support {
    std::vector<std::int32_t> index;  // grid index per active node
    std::vector<std::int64_t> units;
};

Support collect_support(const std::vector<std::int64_t>& units) {
    Support s;
    for (std::size_t i = 0; i < units.size(); ++i)
        if (units[i] > 0) {
            s.index.push_back(std::int32_t(i));
            s.units.push_back(units[i]);
        }
    return s;
}

TransportResult zero_result(const Grid& g0, const Grid& g1) {
    TransportResult r;
    r.g0 = {g0, std::vector<double>(g0.size(), 0.0)};
    r.g1 = {g1, std::vector<double>(g1.size(), 0.0)};
    r.stats.quantization_unit = 1.0;
    return r;
}

// Shared by the balanced and unbalanced paths. Zero-unit pixels cannot send
// or receive flow, so the network is built over the supports only; reported
// edge counts refer to nonzero-pixel pairs.
TransportResult solve_quantized(const Grid& grid0, const Grid& grid1,
                                const std::vector<std::int64_t>& units0,
                                const std::vector<std::int64_t>& units1,
                                double unit, const GroundCost& c, double kappa,
                                bool with_aux_node) {
    const Support src = collect_support(units0);
    const Support snk = collect_support(units1);
    const int ns = std::ssize(src.index);
    const int nt = std::ssize(snk.index);

    FlowNetwork net;
    net.node_count = ns + nt + (with_aux_node ? 1 : 0);
    net.supply.resize(net.node_count);
    std::int64_t t0 = 0, t1 = 0;
    for (int i = 0; i < ns; ++i) {
        net.supply[i] = src.units[i];
        t0 += src.units[i];
    }
    for (int j = 0; j < nt; ++j) {
        net.supply[ns + j] = -snk.units[j];
        t1 += snk.units[j];
    }
    const std::int32_t w = ns + nt;
    if (with_aux_node) net.supply[w] = t1 - t0;

    const double threshold = 2.0 * kappa;
    std::int64_t kept = 0;
    for (std::int32_t i = 0; i < ns; ++i)
        for (std::int32_t j = 0; j < nt; ++j) {
            const double cost = c(src.index[i], snk.index[j]);
            if (!with_aux_node || cost <= threshold) {
                net.edges.push_back({i, std::int32_t(ns + j), cost});
                ++kept;
            }
        }
    const std::int64_t direct_edges = kept;
    if (with_aux_node) {
        for (std::int32_t i = 0; i < ns; ++i) net.edges.push_back({i, w, kappa});
        for (std::int32_t j = 0; j < nt; ++j)
            net.edges.push_back({w, std::int32_t(ns + j), kappa});
    }

    const FlowSolution sol = solve_min_cost_flow(net);
    if (sol.status != SolveStatus::optimal)
        throw std::runtime_error(
            "transport network unexpectedly infeasible (internal error)");

    TransportResult result;
    result.g0 = {grid0, std::vector<double>(grid0.size(), 0.0)};
    result.g1 = {grid1, std::vector<double>(grid1.size(), 0.0)};
    result.stats.edges_before_prune = std::int64_t(ns) * nt;
    result.stats.edges_after_prune = direct_edges;
    result.stats.simplex_iterations = sol.iterations;
    result.stats.quantization_unit = unit;

    std::vector<std::int64_t> g0_units(grid0.size(), 0);
    std::vector<std::int64_t> g1_units(grid1.size(), 0);
    std::int64_t destroyed_units = 0, created_units = 0;
    for (std::size_t a = 0; a < net.edges.size(); ++a) {
        const std::int64_t f = sol.flow.values[a];
        if (f == 0) continue;
        const auto& e = net.edges[a];
        if (with_aux_node && e.head == w) {
            destroyed_units += f;
        } else if (with_aux_node && e.tail == w) {
            created_units += f;
        } else {
            const int from = src.index[e.tail];
            const int to = snk.index[e.head - ns];
            result.plan.entries.push_back({from, to, f, double(f) * unit});
            g0_units[from] += f;
            g1_units[to] += f;
        }
    }
    for (int i = 0; i < grid0.size(); ++i)
        result.g0.mass[i] = double(g0_units[i]) * unit;
    for (int j = 0; j < grid1.size(); ++j)
        result.g1.mass[j] = double(g1_units[j]) * unit;
    result.destroyed_mass = double(destroyed_units) * unit;
    result.created_mass = double(created_units) * unit;
    result.value = sol.objective * unit;
    return result;
}

}  // namespace

TransportResult unbalanced_distance(const MassDistribution& f0,
                                    const MassDistribution& f1,
                                    const GroundCost& c, double kappa,
                                    std::int64_t resolution) {
    validate_distribution(f0);
    validate_distribution(f1);
    if (!(kappa > 0.0))
        throw std::invalid_argument("unbalanced_distance requires kappa > 0");
    if (resolution < 1)
        throw std::invalid_argument("resolution must be at least 1");

    const double t0 = total_mass(f0);
    const double t1 = total_mass(f1);
    if (t0 == 0.0 && t1 == 0.0) return zero_result(f0.grid, f1.grid);

    // Joint quantization: one shared unit, per-distribution largest
    // remainder, so the auxiliary supply is an exact integer.
    const double unit = (t0 + t1) / double(2 * resolution);
    const auto target0 = std::int64_t(std::llround(t0 / unit));
    const auto target1 = std::int64_t(std::llround(t1 / unit));
    const auto units0 = quantize_to_units(f0.mass, target0);
    const auto units1 = quantize_to_units(f1.mass, target1);

    return solve_quantized(f0.grid, f1.grid, units0, units1, unit, c, kappa,
                           /*with_aux_node=*/true);
}

TransportResult balanced_distance(const MassDistribution& f0,
                                  const MassDistribution& f1,
                                  const GroundCost& c, std::int64_t resolution) {
    validate_distribution(f0);
    validate_distribution(f1);
    if (resolution < 1)
        throw std::invalid_argument("resolution must be at least 1");

    const double t0 = total_mass(f0);
    const double t1 = total_mass(f1);
    if (std::abs(t0 - t1) > 1e-9 * std::max(t0, t1))
        throw std::invalid_argument(
            "balanced_distance requires equal total masses; "
            "use unbalanced_distance for differing totals");
    if (t0 == 0.0 && t1 == 0.0) return zero_result(f0.grid, f1.grid);

    const double unit = (t0 + t1) / double(2 * resolution);
    const auto units0 = quantize_to_units(f0.mass, resolution);
    const auto units1 = quantize_to_units(f1.mass, resolution);

    return solve_quantized(f0.grid, f1.grid, units0, units1, unit, c,
                           /*kappa=*/0.0, /*with_aux_node=*/false);
}

double wasserstein_distance(const MassDistribution& f0,
                            const MassDistribution& f1, double p, double kappa,
                            std::int64_t resolution) {
    if (!(p > 0.0))
        throw std::invalid_argument("wasserstein_distance requires p > 0");
    const GroundCost cost{f0.grid, f1.grid, p};
    const double value = std::isinf(kappa)
                             ? balanced_distance(f0, f1, cost, resolution).value
                             : unbalanced_distance(f0, f1, cost, kappa, resolution).value;
    return std::pow(value, std::min(1.0, 1.0 / p));
}

}  // namespace mk
