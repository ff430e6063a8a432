#include "chq/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chq {

PohozaevReport pohozaev_report_from(const EnergyReport& report, const ProblemParams& params) {
    const double n = params.dimension;
    const double p = params.p;
    PohozaevReport out;
    out.lhs = (n - p) / p * report.t_grad + n / p * report.t_mass;
    out.rhs = (n + params.alpha) / 2.0 * report.d_nonlocal;
    out.residual = out.lhs - out.rhs;
    out.rel_residual = std::abs(out.residual) /
                       std::max({out.lhs, out.rhs, std::numeric_limits<double>::min()});
    return out;
}

PohozaevReport pohozaev_report(const RadialProfile& u, const ProblemParams& params,
                               const RieszOperator& op) {
    return pohozaev_report_from(energy_report(u, params, op), params);
}

double nehari_report(const RadialProfile& u, const ProblemParams& params,
                     const RieszOperator& op) {
    if (!params.nonlinearity.is_power())
        throw unsupported_error("nehari_report: requires the power nonlinearity");
    const EnergyReport report = energy_report(u, params, op);
    return report.t_grad + report.t_mass - params.nonlinearity.q * report.d_nonlocal;
}

WindowVerdict existence_window(int dimension, const Rational& p, const Rational& alpha,
                               const Rational& q) {
    const Rational n(dimension);
    if (!(n > p)) throw std::invalid_argument("existence_window: N > p is required");
    if (!(alpha > Rational(0) && alpha < n))
        throw std::invalid_argument("existence_window: alpha must lie in (0, N)");
    if (!(q > Rational(1))) throw std::invalid_argument("existence_window: q must exceed 1");

    WindowVerdict verdict;
    const Rational half_sum = (n + alpha) / Rational(2);
    verdict.q_lower = (n + alpha) * p / (Rational(2) * n);
    verdict.q_upper = (n + alpha) * p / (Rational(2) * (n - p));
    verdict.a_coeff = q * n / p - half_sum;
    verdict.b_coeff = half_sum - q * (n - p) / p;
    verdict.admissible = verdict.a_coeff > Rational(0) && verdict.b_coeff > Rational(0);
    return verdict;
}

WindowVerdict existence_window(int dimension, double p, double alpha, double q) {
    return existence_window(dimension, Rational::from_double(p), Rational::from_double(alpha),
                            Rational::from_double(q));
}

CutoffField CutoffField::smoothstep(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("cutoff: scale must be positive");
    CutoffField field;
    field.scale = scale;
    field.phi = [](double s) {
        if (s <= 1.0) return 1.0;
        if (s >= 2.0) return 0.0;
        const double t = s - 1.0;
        return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
    };
    field.dphi = [](double s) {
        if (s <= 1.0 || s >= 2.0) return 0.0;
        const double t = s - 1.0;
        return -6.0 * t * (1.0 - t);
    };
    return field;
}

namespace {

inline double pow_abs(double x, double e) { return std::pow(std::abs(x), e); }

inline double flux(double x, double p) {
    if (x == 0.0) return 0.0;
    if (p == 2.0) return x;
    return std::pow(std::abs(x), p - 2.0) * x;
}

}  // namespace

std::vector<DgmsRecord> dgms_check(const RadialProfile& u, const ProblemParams& params,
                                   const RieszOperator& op, const CutoffField& cutoff,
                                   std::span<const double> k_values) {
    const auto& grid = *u.grid;
    if (!same_grid(grid, *op.grid))
        throw std::invalid_argument("dgms_check: profile grid does not match operator grid");
    for (double k : k_values)
        if (!(k > 0.0) || k > grid.max_radius / 2.0)
            throw std::invalid_argument("dgms_check: scale k must lie in (0, R/2]");

    const std::size_t m = grid.size();
    const double n = params.dimension;
    const double p = params.p;

    const RadialProfile du = differentiate(u);
    std::vector<double> grad_p(m), fu(m);
    for (std::size_t i = 0; i < m; ++i) {
        grad_p[i] = pow_abs(du.values[i], p);
        fu[i] = params.nonlinearity.F(u.values[i]);
    }
    const std::vector<double> conv = op.apply(fu);

    double t_grad = 0.0, t_mass = 0.0, d_nonlocal = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        t_grad += grid.weights[i] * grad_p[i];
        t_mass += grid.weights[i] * pow_abs(u.values[i], p);
        d_nonlocal += grid.weights[i] * conv[i] * fu[i];
    }
    const double lhs_limit = (1.0 - n / p) * t_grad;
    const double mass_limit = n / p * t_mass;
    const double nonlocal_limit = -(n + params.alpha) / 2.0 * d_nonlocal;

    std::vector<DgmsRecord> records;
    records.reserve(k_values.size());
    for (double k : k_values) {
        DgmsRecord rec;
        rec.k = k;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = grid.nodes[i];
            const double s = r / k;
            const double phi = cutoff.phi(s);
            const double sphi = s * cutoff.dphi(s);
            const double w = grid.weights[i];
            rec.lhs += w * ((phi + sphi) * grad_p[i] - (n * phi + sphi) * grad_p[i] / p);
            const double radial_flow = phi * r * du.values[i];
            rec.mass -= w * radial_flow * flux(u.values[i], p);
            rec.nonlocal += w * radial_flow * conv[i] * params.nonlinearity.f(u.values[i]);
        }
        rec.identity_residual = rec.lhs - (rec.mass + rec.nonlocal);
        rec.rel_residual = std::abs(rec.identity_residual) /
                           std::max({std::abs(rec.lhs), std::abs(rec.mass + rec.nonlocal),
                                     std::numeric_limits<double>::min()});
        rec.lhs_limit_distance = std::abs(rec.lhs - lhs_limit);
        rec.mass_limit_distance = std::abs(rec.mass - mass_limit);
        rec.nonlocal_limit_distance = std::abs(rec.nonlocal - nonlocal_limit);
        records.push_back(rec);
    }
    return records;
}

namespace {

// ||u||_{L^nu} via the scaled form max * (sum w (|u|/max)^nu)^{1/nu}; immune
// to overflow for the huge ladder exponents.
double lebesgue_norm(const RadialGrid& grid, const std::vector<double>& values, double nu) {
    double umax = 0.0;
    for (double v : values) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double ratio = std::abs(values[i]) / umax;
        if (ratio > 0.0) sum += grid.weights[i] * std::exp(nu * std::log(ratio));
    }
    return umax * std::exp(std::log(sum) / nu);
}

}  // namespace

std::vector<MoserRecord> moser_ladder(const RadialProfile& u, const ProblemParams& params,
                                      int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("moser_ladder: n_steps must be >= 1");
    const double n = params.dimension;
    const double p = params.p;
    const double q_a = 2.0 * n * p / (n + params.alpha);
    const double p_star = sobolev_exponent(params.dimension, p);
    if (!(p_star > q_a))
        throw std::invalid_argument("moser_ladder: ladder does not ascend (alpha <= N - 2p)");
    const double ratio = p_star / q_a;

    std::vector<MoserRecord> records;
    records.reserve(n_steps + 1);
    double nu = p_star;
    for (int step = 0; step <= n_steps; ++step) {
        records.push_back({step, nu, lebesgue_norm(*u.grid, u.values, nu)});
        nu *= ratio;
    }
    return records;
}

std::vector<double> degiorgi_sequence(const RadialProfile& u, double r_exp, double rho,
                                      int n_levels) {
    if (n_levels < 0) throw std::invalid_argument("degiorgi_sequence: n_levels must be >= 0");
    const auto& grid = *u.grid;
    const std::size_t m = grid.size();

    double norm_r = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm_r += grid.weights[i] * pow_abs(u.values[i], r_exp);
    norm_r = std::pow(norm_r, 1.0 / r_exp);
    if (norm_r == 0.0) throw std::invalid_argument("degiorgi_sequence: ||u||_r vanishes");

    const double scale = rho * norm_r;
    std::vector<double> levels;
    levels.reserve(n_levels + 1);
    for (int k = 0; k <= n_levels; ++k) {
        const double shift = k == 0 ? 0.0 : 1.0 - std::pow(2.0, -k);
        double mass = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = std::max(u.values[i] / scale - shift, 0.0);
            if (w > 0.0) mass += grid.weights[i] * std::pow(w, r_exp);
        }
        levels.push_back(mass);
    }
    return levels;
}

DecayFit decay_fit(const RadialProfile& u, double r_a, double r_b) {
    const auto& grid = *u.grid;
    if (!(r_a < r_b)) throw std::invalid_argument("decay_fit: empty window");
    if (r_b > 0.9 * grid.max_radius)
        throw std::invalid_argument("decay_fit: window reaches the truncation boundary");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.nodes[i];
        if (r < r_a || r > r_b) continue;
        if (!(u.values[i] > 0.0))
            throw std::invalid_argument("decay_fit: nonpositive values in window");
        xs.push_back(r);
        ys.push_back(std::log(u.values[i]));
    }
    if (xs.size() < 3) throw std::invalid_argument("decay_fit: window holds fewer than 3 nodes");

    const double count = double(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / count;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean = sy / count;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = intercept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    DecayFit out;
    out.rate = -slope;
    out.amplitude = std::exp(intercept);
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

std::vector<HlsRecord> hls_scaling_check(const std::function<double(double)>& f,
                                         const std::function<double(double)>& h,
                                         int dimension, double mu, double r_exp, double t_exp,
                                         std::span<const double> lambdas, double max_radius,
                                         int node_count) {
    if (!(mu > 0.0 && mu < dimension))
        throw std::invalid_argument("hls_scaling_check: mu must lie in (0, N)");
    if (std::abs(1.0 / r_exp + mu / dimension + 1.0 / t_exp - 2.0) > 1e-12)
        throw std::invalid_argument("hls_scaling_check: exponents must satisfy 1/r + mu/N + 1/t = 2");
    const double alpha = dimension - mu;

    std::vector<HlsRecord> records;
    records.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw std::invalid_argument("hls_scaling_check: lambda must be positive");
        const GridPtr grid = build_grid(max_radius / lambda, node_count, dimension);
        const RieszOperator op = build_kernel(grid, dimension, alpha);
        const std::size_t m = grid->size();
        std::vector<double> fs(m), hs(m);
        for (std::size_t i = 0; i < m; ++i) {
            fs[i] = f(lambda * grid->nodes[i]);
            hs[i] = h(lambda * grid->nodes[i]);
        }
        const std::vector<double> conv = op.apply(hs);
        double bilinear = 0.0, fnorm = 0.0, hnorm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            bilinear += grid->weights[i] * fs[i] * conv[i];
            fnorm += grid->weights[i] * pow_abs(fs[i], r_exp);
            hnorm += grid->weights[i] * pow_abs(hs[i], t_exp);
        }
        bilinear /= op.normalization;  // strip A_{N,alpha}: plain |x-y|^{-mu} pairing
        fnorm = std::pow(fnorm, 1.0 / r_exp);
        hnorm = std::pow(hnorm, 1.0 / t_exp);

        HlsRecord rec;
        rec.lambda = lambda;
        if (fnorm == 0.0 || hnorm == 0.0) {
            rec.degenerate = true;
        } else {
            rec.quotient = bilinear / (fnorm * hnorm);
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace chq
