#ifndef PERINT_ORACLE_HPP
#define PERINT_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "perint/common.hpp"
#include "perint/increments.hpp"
#include "perint/spectral.hpp"

namespace perint {

// Covariance tables for the observed-increment sequence z, the noise eta,
// and their cross moments, indexed by lag h in [-H, H]:
//   z(h)     = E[z_{j+h} z_j^*]    = (1/2pi) integral e^{ihl} q
//   eta(h)   = E[eta_{j+h} eta_j^*] = (1/2pi) integral e^{ihl} g
//   cross(h) = E[eta_{j+h} z_j^*]  = (1/2pi) integral e^{ihl} (1-e^{il tau})^d g
// cross has no lag symmetry, so every table stores the full range.
struct CovarianceTable {
  int H = 0;
  std::vector<Mat> z, eta, cross;
  const Mat& R_z(int h) const { return z[static_cast<std::size_t>(h + H)]; }
  const Mat& R_eta(int h) const { return eta[static_cast<std::size_t>(h + H)]; }
  const Mat& R_cross(int h) const { return cross[static_cast<std::size_t>(h + H)]; }
};

// Long lags need proportionally many oscillatory-quadrature nodes; the grid
// is grown to max(base nodes, ceil(2.5 * H)).
CovarianceTable build_covariance_table(const CombinedDensity& cd, int H,
                                       const QuadratureSpec& qs);

// Finite-window projection estimate of the gap functional, built purely from
// covariance algebra: H = sum_j b_j^T z_j - sum_j a_j^T eta_j is projected
// onto the observed increments z_m, m in {-M..-1} u {P+1..P+M}, and the
// projection residual variance is reported per requested window M.
struct OracleResult {
  double var_target = 0;           // Var(H)
  std::vector<int> windows;        // ascending window sizes M
  std::vector<double> mse;         // projection MSE per window
  double mse_final = 0;            // value at the largest window
};

OracleResult oracle_mse(const IncrementSpec& inc, const std::vector<Vec>& a_blocks,
                        const CombinedDensity& cd, std::vector<int> windows,
                        const QuadratureSpec& qs);

// Monte Carlo check of the same projection: draws circularly symmetric
// complex Gaussian samples of (z-window, H) with the model covariance and
// measures the empirical residual second moment. Deterministic for a fixed
// seed; paths are reduced sequentially so reruns are bit-identical.
struct MonteCarloResult {
  double empirical_mse = 0;
  double stderr_mse = 0;           // standard error of the empirical mean
  double oracle_mse = 0;           // covariance-algebra value for the window
  int paths = 0;
  int window = 0;
  std::uint64_t seed = 0;
};

MonteCarloResult monte_carlo_mse(const IncrementSpec& inc, const std::vector<Vec>& a_blocks,
                                 const CombinedDensity& cd, int window, int paths,
                                 std::uint64_t seed, const QuadratureSpec& qs);

}  // namespace perint

#endif
