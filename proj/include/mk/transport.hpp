#pragma once

#include <cstdint>
#include <vector>

#include "mk/distributions.hpp"
#include "mk/flow.hpp"

namespace mk {

/// Sparse transport plan. Entries carry both the integer flow in
/// quantization units and the corresponding real mass.
struct TransportPlan {
    struct Entry {
        int from = 0;  // index into the source grid
        int to = 0;    // index into the target grid
        std::int64_t units = 0;
        double mass = 0.0;
    };
    std::vector<Entry> entries;
};

struct TransportStats {
    std::int64_t edges_before_prune = 0;  // direct pairs over nonzero pixels
    std::int64_t edges_after_prune = 0;
    std::int64_t simplex_iterations = 0;
    double quantization_unit = 0.0;
};

struct TransportResult {
    double value = 0.0;
    TransportPlan plan;
    MassDistribution g0;  // transported part of f0 (row marginals of the plan)
    MassDistribution g1;  // transported part of f1 (column marginals)
    double created_mass = 0.0;    // ||f1 - g1||_1
    double destroyed_mass = 0.0;  // ||f0 - g0||_1
    TransportStats stats;
};

/// Keeps exactly the direct source->sink edges with cost <= 2*kappa;
/// edges through the auxiliary node are always kept.
struct EdgePredicate {
    const GroundCost* cost = nullptr;
    double kappa = 0.0;

    bool keeps(int i, int j) const { return (*cost)(i, j) <= 2.0 * kappa; }
    bool keeps_cost(double c) const { return c <= 2.0 * kappa; }
};

EdgePredicate prune_edges(const GroundCost& c, double kappa);

/// Which directions of the auxiliary-node edges to emit. Only source->w and
/// w->sink can ever carry useful flow; `bidirectional` adds the reverse
/// directions for cross-checking against the full construction.
enum class WEdgeMode { forward_only, bidirectional };

/// Builds the flow network with K0 sources (supplies f0.units), K1 sinks
/// (supplies -f1.units) and the auxiliary node w: sources 0..K0-1, sinks
/// K0..K0+K1-1, w = K0+K1 with supply ||f1|| - ||f0|| in units. Direct edges
/// carry the ground cost and are pruned at 2*kappa; w edges cost kappa.
/// Requires matching unit sizes.
FlowNetwork build_transport_network(const QuantizedDistribution& f0,
                                    const QuantizedDistribution& f1,
                                    const GroundCost& c, double kappa,
                                    WEdgeMode mode = WEdgeMode::forward_only);

/// Unbalanced Monge-Kantorovich distance (mass creation/destruction at
/// price kappa per unit). Quantizes jointly at a shared unit, solves the
/// pruned flow problem exactly, and maps the flow back to a plan.
TransportResult unbalanced_distance(const MassDistribution& f0,
                                    const MassDistribution& f1,
                                    const GroundCost& c, double kappa,
                                    std::int64_t resolution);

/// Balanced transport; requires equal totals (relative 1e-9) and refers the
/// caller to unbalanced_distance otherwise.
TransportResult balanced_distance(const MassDistribution& f0,
                                  const MassDistribution& f1,
                                  const GroundCost& c, std::int64_t resolution);

/// Wasserstein value: transport with cost d^p, result raised to min(1, 1/p).
/// An infinite kappa selects the balanced problem.
double wasserstein_distance(const MassDistribution& f0,
                            const MassDistribution& f1, double p, double kappa,
                            std::int64_t resolution);

}  // namespace mk
