#include "mk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mk {

void validate_grid(const Grid& grid) {
    if (grid.width < 1 || grid.height < 1)
        throw std::invalid_argument("grid dimensions must be at least 1x1");
    if (!(grid.spacing > 0.0) || !std::isfinite(grid.spacing))
        throw std::invalid_argument("grid spacing must be positive and finite");
}

void validate_distribution(const MassDistribution& f) {
    validate_grid(f.grid);
    if (std::ssize(f.mass) != f.grid.size())
        throw std::invalid_argument("mass entry count does not match grid size");
    for (double v : f.mass)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("mass entries must be finite and nonnegative");
}

double total_mass(const MassDistribution& f) {
    return std::accumulate(f.mass.begin(), f.mass.end(), 0.0);
}

std::int64_t QuantizedDistribution::total_units() const {
    return std::accumulate(units.begin(), units.end(), std::int64_t{0});
}

std::vector<std::int64_t> quantize_to_units(std::span<const double> mass,
                                            std::int64_t target_units) {
    if (target_units < 0)
        throw std::invalid_argument("target unit count must be nonnegative");
    const std::size_t n = mass.size();
    std::vector<std::int64_t> units(n, 0);
    if (target_units == 0) return units;

    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("cannot place units on an all-zero distribution");

    std::vector<double> remainder(n, 0.0);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = mass[i] / total * double(target_units);
        const double fl = std::floor(share);
        units[i] = std::int64_t(fl);
        remainder[i] = share - fl;
        assigned += units[i];
    }

    std::int64_t deficit = target_units - assigned;
    if (deficit > 0) {
        // Round up the largest remainders; only pixels that carry mass are
        // eligible so quantization never widens the support.
        std::vector<std::size_t> order;
        order.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (mass[i] > 0.0) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
            return a < b;
        });
        std::size_t cursor = 0;
        while (deficit > 0) {
            units[order[cursor]] += 1;
            --deficit;
            cursor = (cursor + 1) % order.size();
        }
    }
    return units;
}

QuantizedDistribution quantize(const MassDistribution& f, std::int64_t resolution) {
    if (resolution < 1)
        throw std::invalid_argument("quantization resolution must be at least 1");
    validate_distribution(f);

    const double total = total_mass(f);
    QuantizedDistribution q;
    q.grid = f.grid;
    if (total == 0.0) {
        q.units.assign(f.mass.size(), 0);
        q.unit_size = 1.0;
        return q;
    }
    q.unit_size = total / double(resolution);
    q.units = quantize_to_units(f.mass, resolution);
    return q;
}

double GroundCost::operator()(int i, int j) const {
    const double dx = grid0.x(i) - grid1.x(j);
    const double dy = grid0.y(i) - grid1.y(j);
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) return 0.0;
    if (exponent == 2.0) return d2;
    const double d = std::sqrt(d2);
    if (exponent == 1.0) return d;
    return std::pow(d, exponent);
}

double GroundCost::at(int i, int j) const {
    if (i < 0 || i >= grid0.size())
        throw std::invalid_argument("ground cost: source index " + std::to_string(i) +
                                    " out of range");
    if (j < 0 || j >= grid1.size())
        throw std::invalid_argument("ground cost: target index " + std::to_string(j) +
                                    " out of range");
    return (*this)(i, j);
}

double GroundCost::max_cost() const {
    // Corner-to-corner distance bounds every pixel pair.
    const double w0 = (grid0.width - 1) * grid0.spacing;
    const double h0 = (grid0.height - 1) * grid0.spacing;
    const double w1 = (grid1.width - 1) * grid1.spacing;
    const double h1 = (grid1.height - 1) * grid1.spacing;
    const double dx = std::max(w0, w1);
    const double dy = std::max(h0, h1);
    const double d = std::sqrt(dx * dx + dy * dy);
    return exponent == 1.0 ? d : std::pow(d, exponent);
}

}  // namespace mk
