#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chq/functional.hpp"
#include "chq/solver.hpp"

namespace chq {

/// Config file is malformed; message carries line-level diagnostics.
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * Flat dotted-key run configuration.
 *
 * Lines are `section.key = value`, '#' starts a comment, unknown keys are
 * errors. Required keys: problem.N, problem.p, problem.alpha, problem.q,
 * grid.R, grid.M; everything else has defaults.
 */
struct RunConfig {
    int dimension = 0;
    double p = 0.0;
    double alpha = 0.0;
    std::string kind = "power";
    double q = 0.0;
    // exact literals, kept for window decisions in rational arithmetic
    std::string p_text, alpha_text, q_text;

    double max_radius = 0.0;
    int node_count = 0;
    GridScheme scheme = GridScheme::uniform;

    SolveConfig solver;

    std::vector<double> k_values;        // default R/8, R/4, R/2
    int moser_steps = 8;
    int degiorgi_levels = 50;
    double decay_window_lo = 0.0;        // default 0.4 R
    double decay_window_hi = 0.0;        // default 0.7 R
    double r_exp = 4.0;

    std::string profile_path = "profile.csv";
    std::string report_path = "report.json";

    ProblemParams problem() const;
    GridPtr make_grid() const;
};

RunConfig load_config(const std::string& path);

}  // namespace chq
