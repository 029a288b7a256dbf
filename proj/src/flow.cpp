#include "mk/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mk {

void validate_network(const FlowNetwork& net) {
    if (net.node_count < 1)
        throw std::invalid_argument("flow network needs at least one node");
    if (std::ssize(net.supply) != net.node_count)
        throw std::invalid_argument("supply array size does not match node count");
    std::int64_t balance = 0;
    for (std::int64_t s : net.supply) balance += s;
    if (balance != 0)
        throw std::invalid_argument("total supply must equal total demand");
    for (const auto& e : net.edges) {
        if (e.tail < 0 || e.tail >= net.node_count || e.head < 0 ||
            e.head >= net.node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.tail == e.head)
            throw std::invalid_argument("self-loop edges are not allowed");
        if (!(e.cost >= 0.0) || !std::isfinite(e.cost))
            throw std::invalid_argument("edge costs must be finite and nonnegative");
    }
}

namespace {

constexpr std::int64_t kInfFlow = std::numeric_limits<std::int64_t>::max();

// Primal network simplex on a strongly feasible spanning tree. The tree is
// kept as parent/pred arrays plus intrusive child lists; every node below
// the leaving arc is rehung and repriced in O(subtree).
class NetworkSimplex {
public:
    explicit NetworkSimplex(const FlowNetwork& net)
        : n_(net.node_count),
          m_(std::ssize(net.edges)),
          root_(net.node_count) {
        const std::int64_t arcs = m_ + n_;
        tail_.resize(arcs);
        head_.resize(arcs);
        cost_.resize(arcs);
        flow_.assign(arcs, 0);
        in_tree_.assign(arcs, false);

        double cost_sum = 0.0;
        for (std::int64_t a = 0; a < m_; ++a) {
            tail_[a] = net.edges[a].tail;
            head_[a] = net.edges[a].head;
            cost_[a] = net.edges[a].cost;
            cost_sum += std::abs(net.edges[a].cost);
        }
        big_cost_ = 1.0 + cost_sum;

        parent_.assign(n_ + 1, -1);
        pred_.assign(n_ + 1, -1);
        depth_.assign(n_ + 1, 0);
        pi_.assign(n_ + 1, 0.0);
        first_child_.assign(n_ + 1, -1);
        next_sib_.assign(n_ + 1, -1);
        prev_sib_.assign(n_ + 1, -1);

        // Artificial arcs form the initial strongly feasible tree: shippers
        // (and zero-supply nodes) point up at the root, receivers hang below.
        for (std::int32_t v = 0; v < n_; ++v) {
            const std::int64_t a = m_ + v;
            cost_[a] = big_cost_;
            in_tree_[a] = true;
            if (net.supply[v] >= 0) {
                tail_[a] = v;
                head_[a] = root_;
                flow_[a] = net.supply[v];
                pi_[v] = big_cost_;
            } else {
                tail_[a] = root_;
                head_[a] = v;
                flow_[a] = -net.supply[v];
                pi_[v] = -big_cost_;
            }
            parent_[v] = root_;
            pred_[v] = a;
            depth_[v] = 1;
            attach_child(root_, v);
        }

        block_size_ = std::max<std::int64_t>(8, std::int64_t(std::sqrt(double(m_))));
    }

    void run() {
        std::int64_t entering;
        while ((entering = find_entering_arc()) >= 0) {
            pivot(entering);
            ++iterations_;
        }
    }

    bool feasible() const {
        for (std::int64_t a = m_; a < m_ + n_; ++a)
            if (flow_[a] > 0) return false;
        return true;
    }

    std::int64_t iterations() const { return iterations_; }

    std::vector<std::int64_t> edge_flows() const {
        return {flow_.begin(), flow_.begin() + m_};
    }

    std::vector<double> node_potentials() const {
        return {pi_.begin(), pi_.begin() + n_};
    }

    // Exact products, compensated sum; deterministic for a given flow.
    double objective() const {
        double sum = 0.0, comp = 0.0;
        for (std::int64_t a = 0; a < m_; ++a) {
            if (flow_[a] == 0) continue;
            const double term = cost_[a] * double(flow_[a]);
            const double t = sum + term;
            comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    }

private:
    void attach_child(std::int32_t parent, std::int32_t child) {
        prev_sib_[child] = -1;
        next_sib_[child] = first_child_[parent];
        if (first_child_[parent] >= 0) prev_sib_[first_child_[parent]] = child;
        first_child_[parent] = child;
    }

    void detach_child(std::int32_t parent, std::int32_t child) {
        if (prev_sib_[child] >= 0)
            next_sib_[prev_sib_[child]] = next_sib_[child];
        else
            first_child_[parent] = next_sib_[child];
        if (next_sib_[child] >= 0) prev_sib_[next_sib_[child]] = prev_sib_[child];
    }

    double reduced_cost(std::int64_t a) const {
        return cost_[a] - pi_[tail_[a]] + pi_[head_[a]];
    }

    // Block search over the real arcs: scan blocks cyclically, return the
    // most negative reduced cost in the first block that has one.
    std::int64_t find_entering_arc() {
        std::int64_t best = -1;
        double best_r = 0.0;
        std::int64_t count = block_size_;
        for (std::int64_t e = next_arc_; e < m_; ++e) {
            if (!in_tree_[e]) {
                const double r = reduced_cost(e);
                if (r < best_r) {
                    best_r = r;
                    best = e;
                }
            }
            if (--count == 0) {
                if (best >= 0) {
                    next_arc_ = e + 1 == m_ ? 0 : e + 1;
                    return best;
                }
                count = block_size_;
            }
        }
        for (std::int64_t e = 0; e < next_arc_; ++e) {
            if (!in_tree_[e]) {
                const double r = reduced_cost(e);
                if (r < best_r) {
                    best_r = r;
                    best = e;
                }
            }
            if (--count == 0) {
                if (best >= 0) {
                    next_arc_ = e + 1;
                    return best;
                }
                count = block_size_;
            }
        }
        if (best >= 0) next_arc_ = 0;
        return best;
    }

    void pivot(std::int64_t entering) {
        const std::int32_t u = tail_[entering];
        const std::int32_t v = head_[entering];

        std::int32_t a = u, b = v;
        while (depth_[a] > depth_[b]) a = parent_[a];
        while (depth_[b] > depth_[a]) b = parent_[b];
        while (a != b) {
            a = parent_[a];
            b = parent_[b];
        }
        const std::int32_t apex = a;

        // Pushing along u->v drains the upward arcs on u's path and the
        // downward arcs on v's path. The leaving arc is the last blocking
        // arc met when walking the cycle from the apex in the push
        // direction; that keeps the tree strongly feasible.
        std::int64_t delta = kInfFlow;
        std::int32_t out_node = -1;
        bool out_on_u_side = true;
        for (std::int32_t x = u; x != apex; x = parent_[x]) {
            const std::int64_t arc = pred_[x];
            if (tail_[arc] == x && flow_[arc] < delta) {
                delta = flow_[arc];
                out_node = x;
            }
        }
        for (std::int32_t x = v; x != apex; x = parent_[x]) {
            const std::int64_t arc = pred_[x];
            if (head_[arc] == x && flow_[arc] <= delta) {
                delta = flow_[arc];
                out_node = x;
                out_on_u_side = false;
            }
        }
        if (out_node < 0)
            throw std::runtime_error(
                "network simplex: unbounded pivot cycle (internal error)");

        if (delta > 0) {
            flow_[entering] += delta;
            for (std::int32_t x = u; x != apex; x = parent_[x]) {
                const std::int64_t arc = pred_[x];
                flow_[arc] += tail_[arc] == x ? -delta : delta;
            }
            for (std::int32_t x = v; x != apex; x = parent_[x]) {
                const std::int64_t arc = pred_[x];
                flow_[arc] += head_[arc] == x ? -delta : delta;
            }
        }

        const std::int64_t leaving = pred_[out_node];
        in_tree_[leaving] = false;
        in_tree_[entering] = true;

        // Rehang the subtree cut off by the leaving arc: reverse the path
        // from the entering endpoint inside it up to the cut, then attach
        // that endpoint below the other one.
        const std::int32_t inside = out_on_u_side ? u : v;
        const std::int32_t outside = out_on_u_side ? v : u;

        detach_child(parent_[out_node], out_node);

        path_nodes_.clear();
        path_arcs_.clear();
        for (std::int32_t x = inside; x != out_node; x = parent_[x]) {
            path_nodes_.push_back(x);
            path_arcs_.push_back(pred_[x]);
        }
        path_nodes_.push_back(out_node);
        for (std::size_t i = 0; i + 1 < path_nodes_.size(); ++i)
            detach_child(path_nodes_[i + 1], path_nodes_[i]);
        for (std::size_t i = 0; i + 1 < path_nodes_.size(); ++i) {
            const std::int32_t child = path_nodes_[i + 1];
            parent_[child] = path_nodes_[i];
            pred_[child] = path_arcs_[i];
            attach_child(path_nodes_[i], child);
        }
        parent_[inside] = outside;
        pred_[inside] = entering;
        attach_child(outside, inside);

        // Arc orientation does not matter for the zero-reduced-cost
        // equation, so the rehung subtree is repriced by one constant.
        const double new_pi = inside == v ? pi_[outside] - cost_[entering]
                                          : pi_[outside] + cost_[entering];
        const double shift = new_pi - pi_[inside];
        stack_.clear();
        stack_.push_back(inside);
        depth_[inside] = depth_[outside] + 1;
        while (!stack_.empty()) {
            const std::int32_t x = stack_.back();
            stack_.pop_back();
            pi_[x] += shift;
            for (std::int32_t cnode = first_child_[x]; cnode >= 0;
                 cnode = next_sib_[cnode]) {
                depth_[cnode] = depth_[x] + 1;
                stack_.push_back(cnode);
            }
        }
    }

    std::int32_t n_;
    std::int64_t m_;
    std::int32_t root_;
    double big_cost_ = 0.0;
    std::int64_t block_size_ = 8;
    std::int64_t next_arc_ = 0;
    std::int64_t iterations_ = 0;

    std::vector<std::int32_t> tail_, head_;
    std::vector<double> cost_;
    std::vector<std::int64_t> flow_;
    std::vector<bool> in_tree_;

    std::vector<std::int32_t> parent_, pred_, depth_;
    std::vector<double> pi_;
    std::vector<std::int32_t> first_child_, next_sib_, prev_sib_;
    std::vector<std::int32_t> path_nodes_;
    std::vector<std::int64_t> path_arcs_;
    std::vector<std::int32_t> stack_;
};

}  // namespace

FlowSolution solve_min_cost_flow(const FlowNetwork& net) {
    validate_network(net);

    NetworkSimplex simplex(net);
    simplex.run();

    FlowSolution solution;
    solution.iterations = simplex.iterations();
    if (!simplex.feasible()) {
        solution.status = SolveStatus::infeasible;
        solution.flow.values.assign(net.edges.size(), 0);
        return solution;
    }
    solution.status = SolveStatus::optimal;
    solution.flow.values = simplex.edge_flows();
    solution.objective = simplex.objective();
    solution.potentials = simplex.node_potentials();
    return solution;
}

FlowValidation validate_flow(const FlowNetwork& net, const Flow& flow) {
    if (flow.values.size() != net.edges.size())
        throw std::invalid_argument("flow array size does not match edge count");

    FlowValidation report;
    std::vector<std::int64_t> net_out(net.node_count, 0);
    for (std::size_t a = 0; a < net.edges.size(); ++a) {
        const std::int64_t f = flow.values[a];
        if (f < 0) report.negative_edges.push_back(a);
        net_out[net.edges[a].tail] += f;
        net_out[net.edges[a].head] -= f;
    }
    for (int v = 0; v < net.node_count; ++v)
        if (net_out[v] != net.supply[v])
            report.unbalanced_nodes.push_back({v, net_out[v] - net.supply[v]});
    return report;
}

void write_dimacs(std::ostream& out, const FlowNetwork& net) {
    std::int64_t total_supply = 0;
    for (std::int64_t s : net.supply)
        if (s > 0) total_supply += s;

    out << "p min " << net.node_count << ' ' << net.edges.size() << '\n';
    for (int v = 0; v < net.node_count; ++v)
        if (net.supply[v] != 0)
            out << "n " << v + 1 << ' ' << net.supply[v] << '\n';
    char buf[64];
    for (const auto& e : net.edges) {
        std::snprintf(buf, sizeof buf, "%.17g", e.cost);
        out << "a " << e.tail + 1 << ' ' << e.head + 1 << " 0 " << total_supply
            << ' ' << buf << '\n';
    }
}

}  // namespace mk
