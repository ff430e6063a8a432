#include "chq/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chq {

double unit_sphere_area(int dimension) {
    if (dimension < 1) throw std::invalid_argument("unit_sphere_area: dimension must be >= 1");
    return 2.0 * std::pow(pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

namespace {
constexpr double kGradedExponent = 2.0;
}

GridPtr build_grid(double max_radius, int node_count, int dimension, GridScheme scheme) {
    if (max_radius <= 0.0) throw std::invalid_argument("build_grid: max_radius must be positive");
    if (node_count < 8) throw std::invalid_argument("build_grid: need at least 8 nodes");
    if (dimension < 2) throw std::invalid_argument("build_grid: dimension must be >= 2");

    auto grid = std::make_shared<RadialGrid>();
    grid->dimension = dimension;
    grid->max_radius = max_radius;
    grid->scheme = scheme;
    grid->nodes.resize(node_count);
    grid->weights.resize(node_count);

    const double area = unit_sphere_area(dimension);
    const int m = node_count;
    if (scheme == GridScheme::uniform) {
        const double h = max_radius / m;
        for (int i = 0; i < m; ++i) {
            const double r = (i + 0.5) * h;
            grid->nodes[i] = r;
            grid->weights[i] = area * std::pow(r, dimension - 1) * h;
        }
    } else {
        // Midpoint rule in the parameter s in (0,1), r = R s^gamma.
        const double gamma = kGradedExponent;
        for (int i = 0; i < m; ++i) {
            const double s = (i + 0.5) / m;
            const double r = max_radius * std::pow(s, gamma);
            grid->nodes[i] = r;
            const double dr_ds = max_radius * gamma * std::pow(s, gamma - 1.0);
            grid->weights[i] = area * std::pow(r, dimension - 1) * dr_ds / m;
        }
    }
    return grid;
}

double integrate(const RadialGrid& grid, std::span<const double> samples) {
    if (samples.size() != grid.size())
        throw std::invalid_argument("integrate: sample count does not match grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weights[i] * samples[i];
    return sum;
}

RadialProfile make_profile(GridPtr grid, std::vector<double> values) {
    if (!grid) throw std::invalid_argument("make_profile: null grid");
    if (values.size() != grid->size())
        throw std::invalid_argument("make_profile: value count does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_profile: non-finite value");
    return RadialProfile{std::move(grid), std::move(values)};
}

double integrate(const RadialProfile& u) { return integrate(*u.grid, u.values); }

bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    if (&a == &b) return true;
    return a.dimension == b.dimension && a.max_radius == b.max_radius &&
           a.scheme == b.scheme && a.nodes == b.nodes;
}

namespace {

// Derivative weights of the quadratic through (x0,x1,x2), evaluated at x.
void lagrange_deriv(double x0, double x1, double x2, double x, double w[3]) {
    w[0] = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    w[1] = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    w[2] = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

}  // namespace

DiffOp diff_op(const RadialGrid& grid) {
    const auto& r = grid.nodes;
    const std::size_t m = r.size();
    if (m < 8) throw std::invalid_argument("diff_op: need at least 8 nodes");

    DiffOp op;
    op.cols.resize(m);
    op.coeff.resize(m);
    double w[3];
    lagrange_deriv(r[0], r[1], r[2], r[0], w);
    op.cols[0] = {0, 1, 2};
    op.coeff[0] = {w[0], w[1], w[2]};
    for (std::size_t i = 1; i + 1 < m; ++i) {
        lagrange_deriv(r[i - 1], r[i], r[i + 1], r[i], w);
        op.cols[i] = {int(i) - 1, int(i), int(i) + 1};
        op.coeff[i] = {w[0], w[1], w[2]};
    }
    lagrange_deriv(r[m - 3], r[m - 2], r[m - 1], r[m - 1], w);
    op.cols[m - 1] = {int(m) - 3, int(m) - 2, int(m) - 1};
    op.coeff[m - 1] = {w[0], w[1], w[2]};
    return op;
}

std::vector<double> DiffOp::apply(std::span<const double> v) const {
    std::vector<double> out(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
        out[i] = coeff[i][0] * v[cols[i][0]] + coeff[i][1] * v[cols[i][1]] +
                 coeff[i][2] * v[cols[i][2]];
    return out;
}

std::vector<double> DiffOp::apply_adjoint_weighted(std::span<const double> x,
                                                   std::span<const double> w) const {
    std::vector<double> out(cols.size(), 0.0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const double wx = w[i] * x[i];
        out[cols[i][0]] += coeff[i][0] * wx;
        out[cols[i][1]] += coeff[i][1] * wx;
        out[cols[i][2]] += coeff[i][2] * wx;
    }
    return out;
}

RadialProfile differentiate(const RadialProfile& u) {
    return RadialProfile{u.grid, diff_op(*u.grid).apply(u.values)};
}

void write_profile_csv(const std::string& path, const RadialProfile& u) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("write_profile_csv: cannot open " + path);
    out << "r,u\n";
    char buf[128];
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.grid->nodes[i], u.values[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_profile_csv: write failed for " + path);
}

RadialProfile read_profile_csv(const std::string& path, GridPtr grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_profile_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_profile_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "r,u") throw std::runtime_error("read_profile_csv: expected header 'r,u' in " + path);

    std::vector<double> radii, values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_profile_csv: missing comma at line " + std::to_string(lineno));
        std::size_t pos = 0;
        radii.push_back(std::stod(line.substr(0, comma), &pos));
        values.push_back(std::stod(line.substr(comma + 1), &pos));
    }
    if (radii.size() != grid->size())
        throw std::invalid_argument("read_profile_csv: row count does not match grid");
    const double tol = 1e-9 * std::max(1.0, grid->max_radius);
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (std::abs(radii[i] - grid->nodes[i]) > tol)
            throw std::invalid_argument("read_profile_csv: node mismatch at row " + std::to_string(i + 1));
    return make_profile(std::move(grid), std::move(values));
}

}  // namespace chq
