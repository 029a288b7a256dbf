#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mk {

/// Uncapacitated min-cost flow instance. supply[v] > 0 means node v ships
/// flow out (out - in = supply); supplies must sum to zero.
struct FlowNetwork {
    struct Edge {
        std::int32_t tail = 0;
        std::int32_t head = 0;
        double cost = 0.0;
    };

    int node_count = 0;
    std::vector<std::int64_t> supply;
    std::vector<Edge> edges;
};

/// Validates node count, supply balance, edge endpoints, self-loops and
/// cost nonnegativity/finiteness; throws std::invalid_argument.
void validate_network(const FlowNetwork& net);

struct Flow {
    std::vector<std::int64_t> values;  // one per edge, nonnegative
};

enum class SolveStatus { optimal, infeasible };

struct FlowSolution {
    Flow flow;
    double objective = 0.0;       // sum of cost * flow over all edges
    std::int64_t iterations = 0;  // simplex pivots
    SolveStatus status = SolveStatus::optimal;
    /// Node potentials from the final spanning tree; for every edge (u,v),
    /// cost(u,v) - pi[u] + pi[v] >= 0 at optimality, with equality on
    /// basic arcs.
    std::vector<double> potentials;
};

/// Network simplex on a strongly feasible spanning tree (artificial root,
/// block-search pivot rule). Flows stay integral; costs are compared with
/// exact floating-point arithmetic. Returns status infeasible when the
/// demand cannot be met.
FlowSolution solve_min_cost_flow(const FlowNetwork& net);

struct FlowValidation {
    struct NodeImbalance {
        int node = 0;
        std::int64_t imbalance = 0;  // (out - in) - supply
    };
    std::vector<NodeImbalance> unbalanced_nodes;
    std::vector<std::size_t> negative_edges;

    bool ok() const { return unbalanced_nodes.empty() && negative_edges.empty(); }
};

/// Checks conservation at every node and nonnegativity of every edge flow.
FlowValidation validate_flow(const FlowNetwork& net, const Flow& flow);

/// DIMACS min-cost-flow dump (1-based ids, capacities set to total supply).
void write_dimacs(std::ostream& out, const FlowNetwork& net);

}  // namespace mk
