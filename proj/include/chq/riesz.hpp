#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "chq/grid.hpp"

namespace chq {

/// Normalization A_{N,alpha} of the Riesz kernel A_{N,alpha} |x|^{-(N-alpha)}.
double riesz_constant(int dimension, double alpha);

/**
 * Dense radial realization of the convolution g -> I_alpha * g.
 *
 * kernel[i*M+j] is the spherical average of the Riesz kernel between the
 * spheres |x| = r_i and |y| = r_j, so applying the matrix against the grid's
 * full-space weights evaluates the convolution of a radial function. The
 * matrix is symmetric with nonnegative entries.
 */
struct RieszOperator {
    GridPtr grid;
    int dimension = 3;
    double alpha = 0.0;
    double normalization = 0.0;       // A_{N,alpha}
    int theta_panels = 0;             // graded panels used by the angular rule
    std::vector<double> kernel;       // M x M, row-major

    double entry(std::size_t i, std::size_t j) const { return kernel[i * grid->size() + j]; }

    /// W_i = sum_j w_j K[i][j] g_j on raw samples.
    std::vector<double> apply(std::span<const double> samples) const;
};

/// Spherically reduced kernel value for radii (ri, rj); exposed for oracles.
/// Computes A_{N,alpha} (w_{N-2}/w_{N-1}) int_0^pi sin^{N-2}t
/// (ri^2 + rj^2 - 2 ri rj cos t)^{-(N-alpha)/2} dt with the graded panel rule.
double kernel_entry(int dimension, double alpha, double ri, double rj, int panels);

/// Assembles the dense kernel. The angular rule starts at 256 graded panels
/// and doubles until row sums change by less than 1e-8 (capped at 4096).
RieszOperator build_kernel(const GridPtr& grid, int dimension, double alpha);

/// W_i = sum_j w_j K[i][j] g_j.
RadialProfile apply(const RieszOperator& op, const RadialProfile& g);

/// Kernel cache file is corrupt or malformed.
class cache_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Hex digest of the kernel key (N, alpha, R, M, scheme); names cache files.
std::string kernel_cache_key(const RadialGrid& grid, int dimension, double alpha);

/// Binary dump with checksum; round-trips bit-exactly.
void save_kernel_cache(const std::string& path, const RieszOperator& op);

/// Loads a cached kernel. Returns nullopt when the file is absent or keyed to
/// different parameters; throws cache_error on checksum or format failure.
std::optional<RieszOperator> load_kernel_cache(const std::string& path, const GridPtr& grid,
                                               int dimension, double alpha);

/// Probes a cache file's integrity without key matching; throws cache_error.
void check_kernel_cache(const std::string& path);

}  // namespace chq
