#include "chq/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace chq {

NonlinearitySpec NonlinearitySpec::power(double exponent) {
    if (!(exponent > 1.0)) throw std::invalid_argument("power nonlinearity needs q > 1");
    NonlinearitySpec spec;
    spec.kind = Kind::power;
    spec.q = exponent;
    return spec;
}

NonlinearitySpec NonlinearitySpec::custom(std::function<double(double)> f,
                                          std::function<double(double)> F) {
    if (!f || !F) throw std::invalid_argument("custom nonlinearity needs both f and F");
    if (std::abs(f(0.0)) > 0.0) throw std::invalid_argument("custom nonlinearity must have f(0) = 0");
    if (std::abs(F(0.0)) > 0.0) throw std::invalid_argument("custom nonlinearity must have F(0) = 0");
    NonlinearitySpec spec;
    spec.kind = Kind::custom;
    spec.q = 0.0;
    spec.f_map = std::move(f);
    spec.F_map = std::move(F);
    return spec;
}

double NonlinearitySpec::f(double t) const {
    if (kind == Kind::power) {
        if (t == 0.0) return 0.0;
        return std::pow(std::abs(t), q - 2.0) * t;
    }
    return f_map(t);
}

double NonlinearitySpec::F(double t) const {
    if (kind == Kind::power) return std::pow(std::abs(t), q) / q;
    return F_map(t);
}

ProblemParams ProblemParams::make(int dimension, double p, double alpha, NonlinearitySpec spec) {
    if (!(p >= 2.0)) throw std::invalid_argument("problem params: p must lie in [2, inf)");
    if (!(dimension > p)) throw std::invalid_argument("problem params: N > p is required");
    const double alpha_floor = std::max(0.0, dimension - 2.0 * p);
    if (!(alpha > alpha_floor && alpha < dimension))
        throw std::invalid_argument("problem params: alpha must lie in ((N-2p)_+, N)");
    return ProblemParams{dimension, p, alpha, std::move(spec)};
}

CriticalExponents critical_exponents(int dimension, double p, double alpha) {
    if (!(dimension > p))
        throw std::invalid_argument("critical_exponents: N > p is required");
    if (!(alpha > 0.0 && alpha < dimension))
        throw std::invalid_argument("critical_exponents: alpha must lie in (0, N)");
    const double n = dimension;
    return CriticalExponents{(n + alpha) * p / (2.0 * n), (n + alpha) * p / (2.0 * (n - p))};
}

double sobolev_exponent(int dimension, double p) {
    if (!(dimension > p)) throw std::invalid_argument("sobolev_exponent: N > p is required");
    return dimension * p / (dimension - p);
}

GrowthVerdict growth_check(const NonlinearitySpec& spec, int dimension, double p, double alpha) {
    const auto crit = critical_exponents(dimension, p, alpha);
    if (spec.is_power())
        return GrowthVerdict{spec.q > crit.lower, spec.q <= crit.upper, false};

    // Sampled limits: |f(t)| / |t|^{q_lower - 1} toward 0 and
    // |f(t)| / |t|^{q_upper - 1} toward infinity.
    double small_first = 0.0, small_last = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double t = std::pow(10.0, -k);
        const double ratio = std::abs(spec.f(t)) / std::pow(t, crit.lower - 1.0);
        if (k == 1) small_first = ratio;
        small_last = ratio;
    }
    double big_first = 0.0, big_last = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const double t = std::pow(10.0, k);
        const double ratio = std::abs(spec.f(t)) / std::pow(t, crit.upper - 1.0);
        if (k == 0) big_first = ratio;
        big_last = ratio;
    }
    GrowthVerdict verdict;
    verdict.f1_ok = small_last <= 0.9 * small_first;
    verdict.f2_ok = big_last <= 1.1 * big_first + 1e-12;
    verdict.sampled = true;
    return verdict;
}

namespace {

inline double pow_abs(double x, double e) { return std::pow(std::abs(x), e); }

// |x|^{p-2} x, the p-Laplacian flux nonlinearity.
inline double flux(double x, double p) {
    if (x == 0.0) return 0.0;
    if (p == 2.0) return x;
    return std::pow(std::abs(x), p - 2.0) * x;
}

void require_match(const RadialProfile& u, const ProblemParams& params, const RieszOperator& op) {
    if (!same_grid(*u.grid, *op.grid))
        throw std::invalid_argument("profile grid does not match operator grid");
    if (op.alpha != params.alpha)
        throw std::invalid_argument("operator alpha does not match problem alpha");
    if (op.dimension != params.dimension)
        throw std::invalid_argument("operator dimension does not match problem dimension");
}

}  // namespace

EnergyReport energy_report(const RadialProfile& u, const ProblemParams& params,
                           const RieszOperator& op) {
    require_match(u, params, op);
    const auto& grid = *u.grid;
    const std::size_t m = grid.size();
    const double p = params.p;

    const RadialProfile du = differentiate(u);
    double t_grad = 0.0, t_mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        t_grad += grid.weights[i] * pow_abs(du.values[i], p);
        t_mass += grid.weights[i] * pow_abs(u.values[i], p);
    }

    std::vector<double> fu(m);
    for (std::size_t i = 0; i < m; ++i) fu[i] = params.nonlinearity.F(u.values[i]);
    const std::vector<double> conv = op.apply(fu);
    double d_nonlocal = 0.0;
    for (std::size_t i = 0; i < m; ++i) d_nonlocal += grid.weights[i] * conv[i] * fu[i];

    EnergyReport report;
    report.t_grad = t_grad;
    report.t_mass = t_mass;
    report.d_nonlocal = d_nonlocal;
    report.energy = (t_grad + t_mass) / p - d_nonlocal / 2.0;
    return report;
}

double weak_residual(const RadialProfile& u, const ProblemParams& params,
                     const RieszOperator& op, const RadialProfile& phi) {
    require_match(u, params, op);
    if (!same_grid(*u.grid, *phi.grid))
        throw std::invalid_argument("weak_residual: test function grid mismatch");
    const auto& grid = *u.grid;
    const std::size_t m = grid.size();
    const double p = params.p;

    const RadialProfile du = differentiate(u);
    const RadialProfile dphi = differentiate(phi);

    std::vector<double> fu(m);
    for (std::size_t i = 0; i < m; ++i) fu[i] = params.nonlinearity.F(u.values[i]);
    const std::vector<double> conv = op.apply(fu);

    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += grid.weights[i] * flux(du.values[i], p) * dphi.values[i];
        acc += grid.weights[i] * flux(u.values[i], p) * phi.values[i];
        acc -= grid.weights[i] * conv[i] * params.nonlinearity.f(u.values[i]) * phi.values[i];
    }
    return acc;
}

}  // namespace chq
