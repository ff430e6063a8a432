#pragma once

#include <stdexcept>

#include "chq/functional.hpp"
#include "chq/identities.hpp"

namespace chq {

/// Requested exponent lies outside the open existence window.
class window_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SeedSpec {
    enum class Kind { gaussian, csv };
    Kind kind = Kind::gaussian;
    double width = 2.0;   // gaussian seed exp(-(r/width)^2)
    std::string path;     // csv seed
};

struct SolveConfig {
    int max_iter = 20000;
    double grad_tol = 1e-8;
    double step0 = 1.0;
    double backtrack = 0.5;
    SeedSpec seed;

    void validate() const;
};

struct Solution {
    RadialProfile profile;   // rescaled state solving the unit-coefficient equation
    EnergyReport report;     // energy decomposition of the rescaled state
    double multiplier = 0.0;  // mu = T(u*) / q at the constrained minimizer
    double rescale = 0.0;     // lambda = mu^{1/(2q - p)}
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // T along accepted descent steps
};

/// Rescales u onto the constraint d_nonlocal(u) = 1 using 2q-homogeneity.
RadialProfile normalize_nonlocal(const RadialProfile& u, const ProblemParams& params,
                                 const RieszOperator& op);

/**
 * Ground state for the power nonlinearity.
 *
 * Minimizes T(u) = t_grad + t_mass on the manifold d_nonlocal(u) = 1 by
 * projected gradient descent with backtracking line search; descent
 * directions are preconditioned by the linear radial operator (-Lap + 1)
 * so the iteration count stays mesh-independent. The minimizer carries the
 * multiplier mu = T/q and rescaling by lambda = mu^{1/(2q-p)} yields the
 * unit-coefficient solution.
 *
 * Throws window_error for q outside (q_lower, q_upper): no nontrivial
 * solution exists there. A zero seed is invalid-argument; running out of
 * iterations returns the partial state with converged = false.
 */
Solution solve_ground_state(const ProblemParams& params, const GridPtr& grid,
                            const RieszOperator& op, const SolveConfig& config);

/// One sample of the dilation energy map t -> E(u(./t)).
struct FiberPoint {
    double t = 0.0;
    double energy = 0.0;
};

struct FiberingResult {
    std::vector<FiberPoint> points;
    double derivative_at_one = 0.0;  // equals the Pohozaev residual bit-for-bit
};

/// Evaluates E(u(./t)) = t^{N-p}/p t_grad + t^N/p t_mass - t^{N+alpha}/2
/// d_nonlocal from the energy report of u; no resampling.
FiberingResult fibering_profile(const RadialProfile& u, const ProblemParams& params,
                                const RieszOperator& op, std::span<const double> t_values);

}  // namespace chq
