#include "mk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mk::oracle {

namespace {

constexpr double kPivotTol = 1e-11;

// Two-phase primal simplex on a dense tableau. Dantzig pricing by default;
// a stall of degenerate pivots flips it to Bland's rule, which cannot cycle.
class Tableau {
public:
    Tableau(const DenseLp& lp) : m_(lp.rows), n_(lp.cols) {
        width_ = n_ + m_ + 1;  // structural | artificial | rhs
        t_.assign(std::size_t(m_) * width_, 0.0);
        basis_.resize(m_);
        row_active_.assign(m_, true);
        for (int i = 0; i < m_; ++i) {
            const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
            for (int j = 0; j < n_; ++j) at(i, j) = sign * lp.a[std::size_t(i) * n_ + j];
            at(i, n_ + i) = 1.0;
            rhs(i) = sign * lp.b[i];
            basis_[i] = n_ + i;
        }
        obj_.assign(width_, 0.0);
    }

    LpStatus solve(const std::vector<double>& c) {
        // Phase 1: minimize the sum of artificials.
        std::vector<double> phase1_cost(n_ + m_, 0.0);
        for (int i = 0; i < m_; ++i) phase1_cost[n_ + i] = 1.0;
        build_objective(phase1_cost);
        if (iterate(phase1_cost, /*allow_artificial=*/true) == LpStatus::unbounded)
            return LpStatus::infeasible;  // phase 1 is bounded below by 0
        if (objective_value(phase1_cost) > 1e-7 * scale_)
            return LpStatus::infeasible;
        purge_artificials();

        std::vector<double> full_cost(n_ + m_, 0.0);
        std::copy(c.begin(), c.end(), full_cost.begin());
        build_objective(full_cost);
        return iterate(full_cost, /*allow_artificial=*/false);
    }

    std::vector<double> primal(int n) const {
        std::vector<double> x(n, 0.0);
        for (int i = 0; i < m_; ++i)
            if (row_active_[i] && basis_[i] < n) x[basis_[i]] = rhs(i);
        return x;
    }

    double objective_value(const std::vector<double>& c) const {
        double z = 0.0;
        for (int i = 0; i < m_; ++i)
            if (row_active_[i]) z += c[basis_[i]] * rhs(i);
        return z;
    }

private:
    double& at(int i, int j) { return t_[std::size_t(i) * width_ + j]; }
    double at(int i, int j) const { return t_[std::size_t(i) * width_ + j]; }
    double& rhs(int i) { return t_[std::size_t(i) * width_ + n_ + m_]; }
    double rhs(int i) const { return t_[std::size_t(i) * width_ + n_ + m_]; }

    void build_objective(const std::vector<double>& c) {
        std::fill(obj_.begin(), obj_.end(), 0.0);
        std::copy(c.begin(), c.end(), obj_.begin());
        scale_ = 1.0;
        for (int i = 0; i < m_; ++i) {
            scale_ = std::max(scale_, std::abs(rhs(i)));
            if (!row_active_[i] || c[basis_[i]] == 0.0) continue;
            const double cb = c[basis_[i]];
            for (int j = 0; j < width_; ++j) obj_[j] -= cb * at(i, j);
        }
    }

    LpStatus iterate(const std::vector<double>& c, bool allow_artificial) {
        const int limit = allow_artificial ? n_ + m_ : n_;
        long stall = 0;
        bool bland = false;
        double last_obj = objective_value(c);
        while (true) {
            int enter = -1;
            double best = 0.0;
            for (int j = 0; j < limit; ++j) {
                const double rj = obj_[j];
                if (rj < (bland ? 0.0 : best)) {
                    enter = j;
                    best = rj;
                    if (bland) break;
                }
            }
            if (enter < 0) return LpStatus::optimal;

            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (!row_active_[i]) continue;
                const double aij = at(i, enter);
                if (aij <= kPivotTol) continue;
                const double ratio = rhs(i) / aij;
                if (ratio < best_ratio ||
                    (ratio == best_ratio && leave >= 0 && basis_[i] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return LpStatus::unbounded;

            pivot(leave, enter);

            const double obj = objective_value(c);
            stall = obj < last_obj ? 0 : stall + 1;
            last_obj = obj;
            if (!bland && stall > 2L * (m_ + n_)) bland = true;
        }
    }

    void pivot(int row, int col) {
        const double piv = at(row, col);
        const double inv = 1.0 / piv;
        for (int j = 0; j < width_; ++j) at(row, j) *= inv;
        at(row, col) = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double factor = at(i, col);
            if (factor == 0.0) continue;
            for (int j = 0; j < width_; ++j) at(i, j) -= factor * at(row, j);
            at(i, col) = 0.0;
        }
        const double zf = obj_[col];
        if (zf != 0.0) {
            for (int j = 0; j < width_; ++j) obj_[j] -= zf * at(row, j);
            obj_[col] = 0.0;
        }
        basis_[row] = col;
    }

    // Pivot leftover basic artificials onto structural columns; rows that
    // offer none are redundant and drop out of further pivoting.
    void purge_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (!row_active_[i] || basis_[i] < n_) continue;
            int col = -1;
            for (int j = 0; j < n_; ++j)
                if (std::abs(at(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            if (col >= 0)
                pivot(i, col);
            else
                row_active_[i] = false;
        }
    }

    int m_, n_, width_;
    double scale_ = 1.0;
    std::vector<double> t_;
    std::vector<double> obj_;
    std::vector<int> basis_;
    std::vector<bool> row_active_;
};

}  // namespace

LpSolution solve_dense_lp(const DenseLp& lp) {
    if (lp.rows < 1 || lp.cols < 1)
        throw std::invalid_argument("dense LP needs at least one row and column");
    if (std::ssize(lp.a) != std::int64_t(lp.rows) * lp.cols ||
        std::ssize(lp.b) != lp.rows || std::ssize(lp.c) != lp.cols)
        throw std::invalid_argument("dense LP array sizes are inconsistent");

    Tableau tableau(lp);
    LpSolution solution;
    solution.status = tableau.solve(lp.c);
    if (solution.status != LpStatus::optimal) return solution;

    solution.x = tableau.primal(lp.cols);
    double z = 0.0;
    for (int j = 0; j < lp.cols; ++j) z += lp.c[j] * solution.x[j];
    solution.objective = z;
    return solution;
}

LpDistanceResult lp_distance(const QuantizedDistribution& f0,
                             const QuantizedDistribution& f1,
                             const GroundCost& c, double kappa) {
    const int k0 = f0.grid.size();
    const int k1 = f1.grid.size();
    if (std::int64_t(k0) * k1 > 4096)
        throw std::invalid_argument("lp_distance instance exceeds the 4096-pair guard");
    if (f0.unit_size != f1.unit_size)
        throw std::invalid_argument("lp_distance requires a shared unit size");
    if (!(kappa > 0.0))
        throw std::invalid_argument("lp_distance requires kappa > 0");

    LpDistanceResult result;
    result.plan.assign(std::size_t(k0) * k1, 0.0);
    result.g0.assign(k0, 0.0);
    result.g1.assign(k1, 0.0);
    if (f0.total_units() == 0 && f1.total_units() == 0) return result;

    // Variables: k0*k1 plan entries, then slack pairs (pos, neg) for
    // f0 - g0 and f1 - g1. All masses are expressed in units.
    const int plan_vars = k0 * k1;
    const int cols = plan_vars + 2 * k0 + 2 * k1;
    const int rows = k0 + k1;

    DenseLp lp;
    lp.rows = rows;
    lp.cols = cols;
    lp.a.assign(std::size_t(rows) * cols, 0.0);
    lp.b.assign(rows, 0.0);
    lp.c.assign(cols, 0.0);

    auto coeff = [&](int row, int col) -> double& {
        return lp.a[std::size_t(row) * cols + col];
    };

    for (int i = 0; i < k0; ++i)
        for (int j = 0; j < k1; ++j) {
            const int var = i * k1 + j;
            lp.c[var] = c(i, j);
            coeff(i, var) = 1.0;       // row marginal of M
            coeff(k0 + j, var) = 1.0;  // column marginal of M
        }
    for (int i = 0; i < k0; ++i) {
        const int pos = plan_vars + 2 * i, neg = pos + 1;
        lp.c[pos] = lp.c[neg] = kappa;
        coeff(i, pos) = 1.0;
        coeff(i, neg) = -1.0;
        lp.b[i] = double(f0.units[i]);
    }
    for (int j = 0; j < k1; ++j) {
        const int pos = plan_vars + 2 * k0 + 2 * j, neg = pos + 1;
        lp.c[pos] = lp.c[neg] = kappa;
        coeff(k0 + j, pos) = 1.0;
        coeff(k0 + j, neg) = -1.0;
        lp.b[k0 + j] = double(f1.units[j]);
    }

    const LpSolution sol = solve_dense_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::runtime_error("lp_distance: reference LP did not reach an optimum");

    const double unit = f0.unit_size;
    result.value = sol.objective * unit;
    for (int i = 0; i < k0; ++i)
        for (int j = 0; j < k1; ++j) {
            const double units = sol.x[std::size_t(i) * k1 + j];
            const double mass = units * unit;
            result.plan[std::size_t(i) * k1 + j] = mass;
            result.g0[i] += mass;
            result.g1[j] += mass;
        }
    return result;
}

}  // namespace mk::oracle
