#include "chq/riesz.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace chq {

double riesz_constant(int dimension, double alpha) {
    if (dimension < 2) throw std::invalid_argument("riesz_constant: dimension must be >= 2");
    if (!(alpha > 0.0 && alpha < dimension))
        throw std::invalid_argument("riesz_constant: alpha must lie in (0, N)");
    const double n = dimension;
    return std::tgamma(0.5 * (n - alpha)) /
           (std::tgamma(0.5 * alpha) * std::pow(pi, 0.5 * n) * std::pow(2.0, alpha));
}

namespace {

constexpr int kInitialPanels = 256;
constexpr int kMaxPanels = 4096;
constexpr double kRowSumTol = 1e-8;

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNode = {-0.8611363115940526, -0.3399810435848563,
                                              0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeight = {0.3478548451374538, 0.6521451548625461,
                                                0.6521451548625461, 0.3478548451374538};

// Angular rule: graded panels (quadratic toward theta = 0) resolving the
// integrable coincident-radius singularity, Gauss points within each panel.
struct ThetaRule {
    std::vector<double> cos_theta;
    std::vector<double> weight_sin;  // gauss weight * sin^{N-2}(theta)
};

ThetaRule build_theta_rule(int dimension, int panels) {
    ThetaRule rule;
    rule.cos_theta.reserve(4 * panels);
    rule.weight_sin.reserve(4 * panels);
    for (int k = 0; k < panels; ++k) {
        const double a = pi * std::pow(double(k) / panels, 2.0);
        const double b = pi * std::pow(double(k + 1) / panels, 2.0);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int g = 0; g < 4; ++g) {
            const double theta = mid + half * kGaussNode[g];
            rule.cos_theta.push_back(std::cos(theta));
            rule.weight_sin.push_back(half * kGaussWeight[g] *
                                      std::pow(std::sin(theta), double(dimension - 2)));
        }
    }
    return rule;
}

// x^expo for the negative kernel exponents, with fast paths for the
// half-integer cases that dominate assembly time.
inline double pow_neg(double x, double expo) {
    if (expo == -0.5) return 1.0 / std::sqrt(x);
    if (expo == -1.0) return 1.0 / x;
    if (expo == -1.5) return 1.0 / (x * std::sqrt(x));
    if (expo == -2.0) return 1.0 / (x * x);
    return std::pow(x, expo);
}

double angular_integral(double ri, double rj, double expo, const ThetaRule& rule) {
    const double sumsq = ri * ri + rj * rj;
    const double cross = 2.0 * ri * rj;
    double acc = 0.0;
    const std::size_t n = rule.cos_theta.size();
    for (std::size_t g = 0; g < n; ++g)
        acc += rule.weight_sin[g] * pow_neg(sumsq - cross * rule.cos_theta[g], expo);
    return acc;
}

void parallel_rows(std::size_t rows, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1 || rows < 2 * workers) {
        for (std::size_t i = 0; i < rows; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < rows; i += workers) body(i);
        });
    for (auto& th : pool) th.join();
}

// Upper triangle assembled in parallel, mirrored for exact symmetry.
void assemble(std::vector<double>& kernel, const std::vector<double>& r, double scale,
              double expo, const ThetaRule& rule) {
    const std::size_t m = r.size();
    parallel_rows(m, [&](std::size_t i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = scale * angular_integral(r[i], r[j], expo, rule);
            kernel[i * m + j] = v;
            kernel[j * m + i] = v;
        }
    });
}

std::vector<double> row_sums(const std::vector<double>& kernel, const RadialGrid& grid) {
    const std::size_t m = grid.size();
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += grid.weights[j] * kernel[i * m + j];
        sums[i] = acc;
    }
    return sums;
}

}  // namespace

double kernel_entry(int dimension, double alpha, double ri, double rj, int panels) {
    const double scale = riesz_constant(dimension, alpha) * unit_sphere_area(dimension - 1) /
                         unit_sphere_area(dimension);
    const double expo = -0.5 * (dimension - alpha);
    const ThetaRule rule = build_theta_rule(dimension, panels);
    return scale * angular_integral(ri, rj, expo, rule);
}

RieszOperator build_kernel(const GridPtr& grid, int dimension, double alpha) {
    if (!grid) throw std::invalid_argument("build_kernel: null grid");
    if (grid->dimension != dimension)
        throw std::invalid_argument("build_kernel: grid dimension mismatch");
    if (!(alpha > 0.0 && alpha < dimension))
        throw std::invalid_argument("build_kernel: alpha must lie in (0, N)");

    RieszOperator op;
    op.grid = grid;
    op.dimension = dimension;
    op.alpha = alpha;
    op.normalization = riesz_constant(dimension, alpha);

    const std::size_t m = grid->size();
    const double scale = op.normalization * unit_sphere_area(dimension - 1) /
                         unit_sphere_area(dimension);
    const double expo = -0.5 * (dimension - alpha);

    op.kernel.assign(m * m, 0.0);
    int panels = kInitialPanels;
    assemble(op.kernel, grid->nodes, scale, expo, build_theta_rule(dimension, panels));
    std::vector<double> sums = row_sums(op.kernel, *grid);

    std::vector<double> next(m * m);
    while (panels < kMaxPanels) {
        const int doubled = 2 * panels;
        assemble(next, grid->nodes, scale, expo, build_theta_rule(dimension, doubled));
        std::vector<double> next_sums = row_sums(next, *grid);
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            change = std::max(change, std::abs(next_sums[i] - sums[i]) / (1.0 + std::abs(next_sums[i])));
        op.kernel.swap(next);
        sums.swap(next_sums);
        panels = doubled;
        if (change < kRowSumTol) break;
    }
    op.theta_panels = panels;
    return op;
}

std::vector<double> RieszOperator::apply(std::span<const double> samples) const {
    const auto& g = *grid;
    const std::size_t m = g.size();
    if (samples.size() != m)
        throw std::invalid_argument("riesz apply: sample count does not match grid");
    std::vector<double> weighted(m);
    for (std::size_t j = 0; j < m; ++j) weighted[j] = g.weights[j] * samples[j];
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = kernel.data() + i * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * weighted[j];
        out[i] = acc;
    }
    return out;
}

RadialProfile apply(const RieszOperator& op, const RadialProfile& g) {
    if (!same_grid(*op.grid, *g.grid))
        throw std::invalid_argument("riesz apply: profile grid does not match operator grid");
    return RadialProfile{op.grid, op.apply(g.values)};
}

namespace {

constexpr char kCacheMagic[8] = {'C', 'H', 'Q', 'K', 'R', 'N', 'L', '1'};

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

template <typename T>
void put(std::string& buf, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) throw cache_error("kernel cache truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

std::string kernel_cache_key(const RadialGrid& grid, int dimension, double alpha) {
    std::string buf;
    put(buf, std::uint32_t(dimension));
    put(buf, std::uint32_t(grid.size()));
    put(buf, std::uint32_t(grid.scheme));
    put(buf, alpha);
    put(buf, grid.max_radius);
    const std::uint64_t h = fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void save_kernel_cache(const std::string& path, const RieszOperator& op) {
    const auto& grid = *op.grid;
    std::string buf;
    buf.append(kCacheMagic, sizeof kCacheMagic);
    put(buf, std::uint32_t(op.dimension));
    put(buf, std::uint32_t(grid.size()));
    put(buf, std::uint32_t(grid.scheme));
    put(buf, std::uint32_t(op.theta_panels));
    put(buf, op.alpha);
    put(buf, grid.max_radius);
    for (double r : grid.nodes) put(buf, r);
    for (double w : grid.weights) put(buf, w);
    for (double k : op.kernel) put(buf, k);
    const std::uint64_t sum =
        fnv1a(reinterpret_cast<const unsigned char*>(buf.data()) + sizeof kCacheMagic,
              buf.size() - sizeof kCacheMagic);
    put(buf, sum);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_kernel_cache: cannot open " + path);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw std::runtime_error("save_kernel_cache: write failed for " + path);
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void verify_envelope(const std::string& buf, const std::string& path) {
    if (buf.size() < sizeof kCacheMagic + sizeof(std::uint64_t) ||
        std::memcmp(buf.data(), kCacheMagic, sizeof kCacheMagic) != 0)
        throw cache_error("kernel cache invalid: " + path + " is not a kernel cache file");
    const std::size_t body = buf.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof stored);
    const std::uint64_t sum =
        fnv1a(reinterpret_cast<const unsigned char*>(buf.data()) + sizeof kCacheMagic,
              body - sizeof kCacheMagic);
    if (stored != sum)
        throw cache_error("kernel cache invalid: checksum mismatch in " + path);
}

}  // namespace

void check_kernel_cache(const std::string& path) {
    if (!std::filesystem::exists(path)) throw cache_error("kernel cache invalid: no such file " + path);
    verify_envelope(slurp(path), path);
}

std::optional<RieszOperator> load_kernel_cache(const std::string& path, const GridPtr& grid,
                                               int dimension, double alpha) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    const std::string buf = slurp(path);
    verify_envelope(buf, path);

    std::size_t pos = sizeof kCacheMagic;
    const auto n = get<std::uint32_t>(buf, pos);
    const auto m = get<std::uint32_t>(buf, pos);
    const auto scheme = get<std::uint32_t>(buf, pos);
    const auto panels = get<std::uint32_t>(buf, pos);
    const auto a = get<double>(buf, pos);
    const auto radius = get<double>(buf, pos);
    if (int(n) != dimension || m != grid->size() || scheme != std::uint32_t(grid->scheme) ||
        a != alpha || radius != grid->max_radius)
        return std::nullopt;  // keyed to different parameters

    RieszOperator op;
    op.grid = grid;
    op.dimension = dimension;
    op.alpha = alpha;
    op.normalization = riesz_constant(dimension, alpha);
    op.theta_panels = int(panels);
    for (std::size_t i = 0; i < m; ++i)
        if (get<double>(buf, pos) != grid->nodes[i]) return std::nullopt;
    for (std::size_t i = 0; i < m; ++i)
        if (get<double>(buf, pos) != grid->weights[i]) return std::nullopt;
    op.kernel.resize(std::size_t(m) * m);
    for (auto& k : op.kernel) k = get<double>(buf, pos);
    return op;
}

}  // namespace chq
