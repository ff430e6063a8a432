#pragma once

#include <functional>

#include "chq/functional.hpp"
#include "chq/rational.hpp"

namespace chq {

/// Operation not defined for the given nonlinearity kind.
class unsupported_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * Both sides of the Pohozaev identity
 *   (N-p)/p t_grad + N/p t_mass = (N+alpha)/2 d_nonlocal
 * together with the defect. rel_residual is |residual| / max(lhs, rhs, tiny).
 */
struct PohozaevReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double rel_residual = 0.0;
};

/// Canonical arithmetic path; fibering reuses it bit-identically.
PohozaevReport pohozaev_report_from(const EnergyReport& report, const ProblemParams& params);

PohozaevReport pohozaev_report(const RadialProfile& u, const ProblemParams& params,
                               const RieszOperator& op);

/// t_grad + t_mass - q d_nonlocal; the weak form tested with u itself.
/// Requires the power nonlinearity (f(t) t = q F(t)).
double nehari_report(const RadialProfile& u, const ProblemParams& params,
                     const RieszOperator& op);

/**
 * Existence window in the power exponent q, decided in exact arithmetic.
 *
 * Solving the Pohozaev and Nehari relations for the gradient and mass shares
 * (a, b) at unit nonlocal term gives a = qN/p - (N+alpha)/2 and
 * b = (N+alpha)/2 - q(N-p)/p; a solution can exist only when both are
 * positive, i.e. exactly when q_lower < q < q_upper (open interval).
 */
struct WindowVerdict {
    Rational q_lower;
    Rational q_upper;
    Rational a_coeff;
    Rational b_coeff;
    bool admissible = false;
};

WindowVerdict existence_window(int dimension, const Rational& p, const Rational& alpha,
                               const Rational& q);

/// Convenience overload on exact dyadic values of the doubles.
WindowVerdict existence_window(int dimension, double p, double alpha, double q);

/**
 * C^1 cutoff shape: phi = 1 on [0,1], 0 on [2,inf), cubic transition between.
 * scale is the dilation k applied as phi(r/k).
 */
struct CutoffField {
    double scale = 1.0;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;

    static CutoffField smoothstep(double scale = 1.0);
};

/**
 * Finite-scale variational identity with the dilation field phi(r/k) r.
 *
 * For each k the identity lhs = mass + nonlocal holds for exact solutions,
 * and each term approaches its Pohozaev limit as k grows; the record carries
 * the distances to those limits.
 */
struct DgmsRecord {
    double k = 0.0;
    double lhs = 0.0;
    double mass = 0.0;
    double nonlocal = 0.0;
    double identity_residual = 0.0;      // lhs - (mass + nonlocal)
    double rel_residual = 0.0;
    double lhs_limit_distance = 0.0;     // |lhs - (1 - N/p) t_grad|
    double mass_limit_distance = 0.0;    // |mass - (N/p) t_mass|
    double nonlocal_limit_distance = 0.0;  // |nonlocal + (N+alpha)/2 d_nonlocal|
};

std::vector<DgmsRecord> dgms_check(const RadialProfile& u, const ProblemParams& params,
                                   const RieszOperator& op, const CutoffField& cutoff,
                                   std::span<const double> k_values);

/// Integrability bootstrap ladder nu_n = p* (p*/q_a)^n with q_a = 2Np/(N+alpha);
/// the weighted L^{nu_n} norms approach the grid maximum of |u|.
struct MoserRecord {
    int n = 0;
    double exponent = 0.0;
    double norm = 0.0;
};

std::vector<MoserRecord> moser_ladder(const RadialProfile& u, const ProblemParams& params,
                                      int n_steps);

/// Level-set masses U_k = ||(v - 1 + 2^{-k})^+||_r^r for v = u/(rho ||u||_r);
/// U_0 uses v^+. Nonincreasing in k.
std::vector<double> degiorgi_sequence(const RadialProfile& u, double r_exp, double rho,
                                      int n_levels);

/// Least-squares exponential tail fit log u = log A - rate * r on a window.
struct DecayFit {
    double rate = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
};

DecayFit decay_fit(const RadialProfile& u, double r_a, double r_b);

/**
 * Scaling invariance of the two-body Riesz quotient
 *   Q = B(f, h) / (||f||_r ||h||_t),  B(f,h) = integral f(x) h(y) |x-y|^{-mu}.
 *
 * Inputs are closed-form radial functions; each dilation f(lambda x) is
 * re-sampled exactly on a grid with radius R/lambda, so Q is
 * lambda-independent up to rounding.
 */
struct HlsRecord {
    double lambda = 0.0;
    double quotient = 0.0;
    bool degenerate = false;
};

std::vector<HlsRecord> hls_scaling_check(const std::function<double(double)>& f,
                                         const std::function<double(double)>& h,
                                         int dimension, double mu, double r_exp, double t_exp,
                                         std::span<const double> lambdas, double max_radius,
                                         int node_count);

}  // namespace chq
