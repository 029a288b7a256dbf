#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mk {

/// Regular 2-D pixel grid. Pixel k (row-major) sits at
/// ((k % width) * spacing, (k / width) * spacing).
struct Grid {
    int width = 0;
    int height = 0;
    double spacing = 1.0;

    int size() const { return width * height; }
    double x(int index) const { return (index % width) * spacing; }
    double y(int index) const { return (index / width) * spacing; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Validates width/height >= 1 and spacing > 0; throws std::invalid_argument.
void validate_grid(const Grid& grid);

/// Nonnegative mass values on a grid (an image treated as a measure).
struct MassDistribution {
    Grid grid;
    std::vector<double> mass;
};

/// Validates entry count, nonnegativity and finiteness.
void validate_distribution(const MassDistribution& f);

double total_mass(const MassDistribution& f);

/// Integer-unit counterpart of a MassDistribution. One unit carries
/// `unit_size` mass; sum(units) * unit_size reproduces the source total.
struct QuantizedDistribution {
    Grid grid;
    std::vector<std::int64_t> units;
    double unit_size = 1.0;

    std::int64_t total_units() const;
};

/// Largest-remainder apportionment: nonnegative integer units summing to
/// exactly `target_units`, each within one unit of its real share.
/// Ties broken by larger remainder, then lower index. All-zero input
/// yields all-zero units (target must then be 0).
std::vector<std::int64_t> quantize_to_units(std::span<const double> mass,
                                            std::int64_t target_units);

/// Quantizes f to `resolution` total units with unit_size = total/resolution.
/// An all-zero f yields all-zero units with unit_size 1.
QuantizedDistribution quantize(const MassDistribution& f, std::int64_t resolution);

/// Ground cost between grid locations: c(i, j) = ||x_i - x_j||_2 ^ exponent.
/// Evaluated lazily; the full K x K matrix is never materialized.
struct GroundCost {
    Grid grid0;
    Grid grid1;
    double exponent = 1.0;

    double operator()(int i, int j) const;

    /// Bounds-checked variant; throws std::invalid_argument on bad indices.
    double at(int i, int j) const;

    /// Largest possible cost between the two grids (corner to corner).
    double max_cost() const;
};

}  // namespace mk
