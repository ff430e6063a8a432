#pragma once

#include <functional>

#include "chq/grid.hpp"
#include "chq/riesz.hpp"

namespace chq {

/**
 * Scalar nonlinearity f with primitive F, F(t) = int_0^t f.
 *
 * The power kind is f(t) = |t|^{q-2} t, F(t) = |t|^q / q. Custom kinds carry
 * user maps; f(0) = 0 is required and checked at construction.
 */
struct NonlinearitySpec {
    enum class Kind { power, custom };

    Kind kind = Kind::power;
    double q = 2.0;
    std::function<double(double)> f_map;
    std::function<double(double)> F_map;

    static NonlinearitySpec power(double exponent);
    static NonlinearitySpec custom(std::function<double(double)> f,
                                   std::function<double(double)> F);

    double f(double t) const;
    double F(double t) const;
    bool is_power() const { return kind == Kind::power; }
};

/// Equation-level parameters (N, p, alpha) plus the nonlinearity.
struct ProblemParams {
    int dimension = 3;     // N
    double p = 2.0;
    double alpha = 2.0;
    NonlinearitySpec nonlinearity;

    /// Validates p in [2, inf), N > p, alpha in ((N-2p)_+, N).
    static ProblemParams make(int dimension, double p, double alpha, NonlinearitySpec spec);
};

struct CriticalExponents {
    double lower = 0.0;  // (N+alpha) p / (2N)
    double upper = 0.0;  // (N+alpha) p / (2(N-p))
};

CriticalExponents critical_exponents(int dimension, double p, double alpha);

/// Sobolev exponent Np/(N-p).
double sobolev_exponent(int dimension, double p);

/// Verdict of the small-t / large-t growth hypotheses on f.
/// Power specs are decided exactly; custom specs are sampled on geometric
/// grids of t and flagged as heuristic.
struct GrowthVerdict {
    bool f1_ok = false;
    bool f2_ok = false;
    bool sampled = false;
};

GrowthVerdict growth_check(const NonlinearitySpec& spec, int dimension, double p, double alpha);

/**
 * Decomposed energy of a profile:
 *   t_grad = int |u'|^p, t_mass = int |u|^p,
 *   d_nonlocal = int (I_alpha * F(u)) F(u),
 *   energy = (t_grad + t_mass)/p - d_nonlocal/2.
 */
struct EnergyReport {
    double t_grad = 0.0;
    double t_mass = 0.0;
    double d_nonlocal = 0.0;
    double energy = 0.0;
};

EnergyReport energy_report(const RadialProfile& u, const ProblemParams& params,
                           const RieszOperator& op);

/// int |u'|^{p-2} u' phi' + int |u|^{p-2} u phi - int (I_alpha*F(u)) f(u) phi.
/// Vanishes for every phi exactly when u solves the discrete equation.
double weak_residual(const RadialProfile& u, const ProblemParams& params,
                     const RieszOperator& op, const RadialProfile& phi);

}  // namespace chq
