#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "chq/config.hpp"

namespace chq {

// Exit-code contract shared by the command layer and scripted harnesses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;        // validation / malformed config
inline constexpr int kExitWindow = 2;       // refuse-to-solve: q outside the window
inline constexpr int kExitDiverged = 3;     // solver ran out of iterations
inline constexpr int kExitCache = 4;        // kernel cache corrupt
inline constexpr int kExitAssert = 5;       // --assert threshold violated

int cmd_info(int dimension, double p, double alpha, std::ostream& out);

int cmd_solve(const std::string& config_path, const std::string& cache_dir, std::ostream& log);

int cmd_verify(const std::string& profile_path, const std::string& config_path,
               bool assert_thresholds, const std::string& cache_dir, std::ostream& log);

int cmd_sweep(const std::string& config_path, const std::string& q_min, const std::string& q_max,
              int steps, std::ostream& out, std::ostream& log);

int cmd_selftest(const std::optional<double>& alpha_probe, const std::string& cache_probe,
                 std::ostream& out);

}  // namespace chq
