#pragma once

#include <cstdint>
#include <vector>

#include "mk/distributions.hpp"

namespace mk::oracle {

/// min c.x subject to A x = b, x >= 0, solved on a dense tableau.
/// Dantzig pricing with a switch to Bland's rule after a stall, so
/// termination is guaranteed. Intended for small reference instances.
struct DenseLp {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major rows x cols
    std::vector<double> b;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    std::vector<double> x;
};

LpSolution solve_dense_lp(const DenseLp& lp);

struct LpDistanceResult {
    double value = 0.0;          // in mass x cost units
    std::vector<double> plan;    // dense K0 x K1, row-major, mass units
    std::vector<double> g0;      // transported marginals, mass units
    std::vector<double> g1;
};

/// Dense reference solver for the unbalanced transport objective
/// Tr(M^T C) + kappa (||f0 - g0||_1 + ||f1 - g1||_1) with the l1 terms
/// split into nonnegative slack pairs. Exact optimum on desk-scale
/// instances; guards K0 * K1 <= 4096.
LpDistanceResult lp_distance(const QuantizedDistribution& f0,
                             const QuantizedDistribution& f1,
                             const GroundCost& c, double kappa);

}  // namespace mk::oracle
