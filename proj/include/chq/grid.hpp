#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace chq {

inline constexpr double pi = 3.14159265358979323846;

/// Surface area of the unit sphere S^{N-1} in R^N, 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int dimension);

enum class GridScheme { uniform, graded };

/**
 * Radial quadrature grid on (0, R].
 *
 * Nodes are strictly increasing and exclude r = 0. Weights carry the full
 * N-dimensional volume factor, so sum_i w_i g(r_i) approximates the
 * whole-space integral of the radial function g over the ball B_R.
 */
struct RadialGrid {
    int dimension = 3;                // N
    double max_radius = 0.0;          // R
    GridScheme scheme = GridScheme::uniform;
    std::vector<double> nodes;        // r_1 < ... < r_M in (0, R]
    std::vector<double> weights;      // w_i > 0

    std::size_t size() const { return nodes.size(); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Midpoint-type grid, second-order quadrature; the graded scheme clusters
/// nodes near the origin (quadratic grading in the parameter coordinate).
GridPtr build_grid(double max_radius, int node_count, int dimension,
                   GridScheme scheme = GridScheme::uniform);

/// Weighted sum realizing the full-space integral of a radial sample vector.
double integrate(const RadialGrid& grid, std::span<const double> samples);

/// Radial function sampled on a grid.
struct RadialProfile {
    GridPtr grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

RadialProfile make_profile(GridPtr grid, std::vector<double> values);

double integrate(const RadialProfile& u);

/// True when both profiles live on the same grid (shared or structurally equal).
bool same_grid(const RadialGrid& a, const RadialGrid& b);

/**
 * Second-order finite-difference radial derivative u'(r_i).
 *
 * Three-point Lagrange stencils: centered in the interior, one-sided at both
 * ends. Exact for quadratic data on any node spacing.
 */
RadialProfile differentiate(const RadialProfile& u);

/// Banded form of the derivative operator behind differentiate(); row i acts
/// on the three nodes cols[i] with weights coeff[i].
struct DiffOp {
    std::vector<std::array<int, 3>> cols;
    std::vector<std::array<double, 3>> coeff;

    std::vector<double> apply(std::span<const double> v) const;
    /// Adjoint against node weights: out = D^T (w * x).
    std::vector<double> apply_adjoint_weighted(std::span<const double> x,
                                               std::span<const double> w) const;
};

DiffOp diff_op(const RadialGrid& grid);

/// CSV persistence, header "r,u", one row per node, round-trip exact.
void write_profile_csv(const std::string& path, const RadialProfile& u);
RadialProfile read_profile_csv(const std::string& path, GridPtr grid);

}  // namespace chq
