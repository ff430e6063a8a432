#include "chq/solver.hpp"

#include <algorithm>
#include <cmath>

namespace chq {

void SolveConfig::validate() const {
    if (max_iter < 1) throw std::invalid_argument("solve config: max_iter must be >= 1");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("solve config: grad_tol must be positive");
    if (!(step0 > 0.0)) throw std::invalid_argument("solve config: step0 must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0))
        throw std::invalid_argument("solve config: backtrack must lie in (0, 1)");
    if (seed.kind == SeedSpec::Kind::gaussian && !(seed.width > 0.0))
        throw std::invalid_argument("solve config: seed width must be positive");
}

namespace {

constexpr double kFluxRegularization = 1e-12;  // inside descent directions only
constexpr double kArmijo = 1e-4;

inline double pow_abs(double x, double e) { return std::pow(std::abs(x), e); }

// |x|^{p-2} x with the degenerate-diffusion regularization for p > 2.
inline double flux_reg(double x, double p) {
    if (p == 2.0) return x;
    return std::pow(x * x + kFluxRegularization, 0.5 * (p - 2.0)) * x;
}

// Banded Cholesky (bandwidth 2) for the preconditioner D^T W D + W.
struct BandedSpd {
    std::vector<double> l0, l1, l2;  // L diag, first and second subdiagonal

    static BandedSpd factor(const DiffOp& diff, const std::vector<double>& w) {
        const std::size_t m = w.size();
        std::vector<double> d0(m, 0.0), d1(m, 0.0), d2(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            for (int s = 0; s < 3; ++s)
                for (int t = 0; t < 3; ++t) {
                    const int i = diff.cols[k][s], j = diff.cols[k][t];
                    const double v = w[k] * diff.coeff[k][s] * diff.coeff[k][t];
                    if (i == j) d0[i] += v;
                    else if (j == i + 1) d1[i] += v;
                    else if (j == i + 2) d2[i] += v;
                }
        }
        for (std::size_t i = 0; i < m; ++i) d0[i] += w[i];

        BandedSpd chol;
        chol.l0.assign(m, 0.0);
        chol.l1.assign(m, 0.0);
        chol.l2.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double diag = d0[i];
            if (i >= 1) diag -= chol.l1[i - 1] * chol.l1[i - 1];
            if (i >= 2) diag -= chol.l2[i - 2] * chol.l2[i - 2];
            chol.l0[i] = std::sqrt(diag);
            if (i + 1 < m) {
                double v = d1[i];
                if (i >= 1) v -= chol.l2[i - 1] * chol.l1[i - 1];
                chol.l1[i] = v / chol.l0[i];
            }
            if (i + 2 < m) chol.l2[i] = d2[i] / chol.l0[i];
        }
        return chol;
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        const std::size_t m = l0.size();
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) {
            double v = rhs[i];
            if (i >= 1) v -= l1[i - 1] * y[i - 1];
            if (i >= 2) v -= l2[i - 2] * y[i - 2];
            y[i] = v / l0[i];
        }
        for (std::size_t i = m; i-- > 0;) {
            double v = y[i];
            if (i + 1 < m) v -= l1[i] * y[i + 1];
            if (i + 2 < m) v -= l2[i] * y[i + 2];
            y[i] = v / l0[i];
        }
        return y;
    }
};

struct ObjectiveState {
    double value = 0.0;            // T(u)
    std::vector<double> deriv;     // Du
};

ObjectiveState objective(const DiffOp& diff, const RadialGrid& grid,
                         const std::vector<double>& u, double p) {
    ObjectiveState state;
    state.deriv = diff.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i)
        state.value += grid.weights[i] * (pow_abs(state.deriv[i], p) + pow_abs(u[i], p));
    return state;
}

double nonlocal_value(const RadialGrid& grid, const RieszOperator& op,
                      const NonlinearitySpec& spec, const std::vector<double>& u,
                      std::vector<double>& fu, std::vector<double>& conv) {
    const std::size_t m = u.size();
    fu.resize(m);
    for (std::size_t i = 0; i < m; ++i) fu[i] = spec.F(u[i]);
    conv = op.apply(fu);
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) d += grid.weights[i] * conv[i] * fu[i];
    return d;
}

}  // namespace

RadialProfile normalize_nonlocal(const RadialProfile& u, const ProblemParams& params,
                                 const RieszOperator& op) {
    if (!params.nonlinearity.is_power())
        throw std::invalid_argument("normalize_nonlocal: requires the power nonlinearity");
    std::vector<double> fu, conv;
    const double d = nonlocal_value(*u.grid, op, params.nonlinearity, u.values, fu, conv);
    if (!(d > 0.0)) throw std::invalid_argument("normalize_nonlocal: vanishing nonlocal term");
    const double gamma = std::pow(d, -1.0 / (2.0 * params.nonlinearity.q));
    RadialProfile out{u.grid, u.values};
    for (double& v : out.values) v *= gamma;
    return out;
}

Solution solve_ground_state(const ProblemParams& params, const GridPtr& grid,
                            const RieszOperator& op, const SolveConfig& config) {
    config.validate();
    if (!params.nonlinearity.is_power())
        throw std::invalid_argument("solve_ground_state: requires the power nonlinearity");
    if (!same_grid(*grid, *op.grid))
        throw std::invalid_argument("solve_ground_state: grid does not match operator");

    const double q = params.nonlinearity.q;
    const auto crit = critical_exponents(params.dimension, params.p, params.alpha);
    if (!(q > crit.lower && q < crit.upper))
        throw window_error("no nontrivial solutions: q must lie strictly inside the window (" +
                           std::to_string(crit.lower) + ", " + std::to_string(crit.upper) + ")");

    const std::size_t m = grid->size();
    const double p = params.p;

    std::vector<double> u(m);
    if (config.seed.kind == SeedSpec::Kind::gaussian) {
        for (std::size_t i = 0; i < m; ++i) {
            const double s = grid->nodes[i] / config.seed.width;
            u[i] = std::exp(-s * s);
        }
    } else {
        u = read_profile_csv(config.seed.path, grid).values;
    }
    for (double& v : u) v = std::max(v, 0.0);
    if (*std::max_element(u.begin(), u.end()) == 0.0)
        throw std::invalid_argument("solve_ground_state: seed profile is identically zero");

    const DiffOp diff = diff_op(*grid);
    const BandedSpd precond = BandedSpd::factor(diff, grid->weights);
    const auto& w = grid->weights;

    std::vector<double> fu, conv;
    double d = nonlocal_value(*grid, op, params.nonlinearity, u, fu, conv);
    if (!(d > 0.0)) throw std::invalid_argument("solve_ground_state: seed has no nonlocal mass");
    {
        const double gamma = std::pow(d, -1.0 / (2.0 * q));
        for (double& v : u) v *= gamma;
    }
    d = nonlocal_value(*grid, op, params.nonlinearity, u, fu, conv);

    ObjectiveState state = objective(diff, *grid, u, p);

    Solution sol;
    sol.objective_trace.push_back(state.value);

    double step = config.step0;
    bool converged = false;
    int iter = 0;
    std::vector<double> flux_vals(m), grad_t(m), grad_d(m), constrained(m), rhs(m);
    std::vector<double> trial(m), trial_fu, trial_conv;

    for (; iter < config.max_iter; ++iter) {
        // Gradients of T and of the constraint in the weighted inner product.
        for (std::size_t i = 0; i < m; ++i) flux_vals[i] = flux_reg(state.deriv[i], p);
        const std::vector<double> adj = diff.apply_adjoint_weighted(flux_vals, w);
        for (std::size_t i = 0; i < m; ++i) {
            grad_t[i] = p * (adj[i] / w[i] + flux_reg(u[i], p));
            grad_d[i] = 2.0 * conv[i] * params.nonlinearity.f(u[i]);
        }

        double tn = 0.0, nn = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            tn += w[i] * grad_t[i] * grad_d[i];
            nn += w[i] * grad_d[i] * grad_d[i];
        }
        const double shift = nn > 0.0 ? tn / nn : 0.0;
        double gnorm_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            constrained[i] = grad_t[i] - shift * grad_d[i];
            gnorm_sq += w[i] * constrained[i] * constrained[i];
        }
        if (std::sqrt(gnorm_sq) <= config.grad_tol * (1.0 + state.value)) {
            converged = true;
            break;
        }

        for (std::size_t i = 0; i < m; ++i) rhs[i] = w[i] * constrained[i];
        const std::vector<double> dir = precond.solve(rhs);
        double slope = 0.0;
        for (std::size_t i = 0; i < m; ++i) slope += w[i] * constrained[i] * dir[i];

        bool accepted = false;
        double s = step;
        for (int attempt = 0; attempt < 60; ++attempt) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = std::max(u[i] - s * dir[i], 0.0);
            const double d_trial =
                nonlocal_value(*grid, op, params.nonlinearity, trial, trial_fu, trial_conv);
            if (d_trial > 0.0) {
                const double gamma = std::pow(d_trial, -1.0 / (2.0 * q));
                for (double& v : trial) v *= gamma;
                const ObjectiveState candidate = objective(diff, *grid, trial, p);
                if (candidate.value <= state.value - kArmijo * s * slope) {
                    u.swap(trial);
                    state = candidate;
                    d = nonlocal_value(*grid, op, params.nonlinearity, u, fu, conv);
                    step = std::min(s * 1.3, 1e6);
                    accepted = true;
                    break;
                }
            }
            s *= config.backtrack;
        }
        sol.objective_trace.push_back(state.value);
        if (!accepted) break;  // line search stalled below representable steps
    }

    // Multiplier from testing the constrained equation with u itself, then
    // rescale to the unit-coefficient equation.
    const double t_final = state.value;
    const double mu = t_final / q;
    const double lambda = std::pow(mu, 1.0 / (2.0 * q - p));

    RadialProfile profile{grid, std::move(u)};
    for (double& v : profile.values) v *= lambda;

    sol.profile = std::move(profile);
    sol.report = energy_report(sol.profile, params, op);
    sol.multiplier = mu;
    sol.rescale = lambda;
    sol.iterations = iter;
    sol.converged = converged;
    return sol;
}

FiberingResult fibering_profile(const RadialProfile& u, const ProblemParams& params,
                                const RieszOperator& op, std::span<const double> t_values) {
    for (double t : t_values)
        if (!(t > 0.0)) throw std::invalid_argument("fibering_profile: t must be positive");

    const EnergyReport report = energy_report(u, params, op);
    const double n = params.dimension;
    const double p = params.p;
    const double a = params.alpha;

    FiberingResult result;
    result.points.reserve(t_values.size());
    for (double t : t_values) {
        const double energy = std::pow(t, n - p) / p * report.t_grad +
                              std::pow(t, n) / p * report.t_mass -
                              std::pow(t, n + a) / 2.0 * report.d_nonlocal;
        result.points.push_back({t, energy});
    }
    result.derivative_at_one = pohozaev_report_from(report, params).residual;
    return result;
}

}  // namespace chq
