#ifndef PERINT_SPECTRAL_HPP
#define PERINT_SPECTRAL_HPP

#include <memory>
#include <string>
#include <vector>

#include "perint/common.hpp"
#include "perint/increments.hpp"

namespace perint {

// Spectral-domain quadrature configuration. The grid is global
// Gauss-Legendre on [-pi, pi]; nodes never sit closer than pole_eps to a
// weight pole (checked at build time).
struct QuadratureSpec {
  int nodes = 2048;
  double pole_eps = 1e-9;

  SpectralGrid build(int tau) const;
};

// w(l) = l^{2d} / |1 - e^{i*l*tau}|^{2d}. Removable singularity at l = 0
// (limit tau^{-2d}); genuine poles at l = 2*pi*m/tau, m != 0, for tau >= 2.
struct SingularWeight {
  int d = 1;
  int tau = 1;
  double lambda_switch = 1e-3;
  double pole_eps = 1e-9;

  double operator()(double lambda) const;   // throws numeric_error near a pole
  double inverse(double lambda) const;      // 1/w, finite everywhere
  double distance_to_pole(double lambda) const;
};

// Matrix spectral density on [-pi, pi]. Families:
//   constant  - fixed Hermitian PSD matrix
//   factor    - Phi(e^{il}) Phi(e^{il})^* for a matrix polynomial Phi
//   seasonal  - w_{d,tau}(l) times a base density (signal side only)
//   grid      - values at stated nodes, linear interpolation in between
class SpectralDensity {
 public:
  enum class Family { constant, factor, seasonal, grid };

  static SpectralDensity Constant(Mat value);
  static SpectralDensity Factor(std::vector<Mat> phi);
  static SpectralDensity Seasonal(SpectralDensity base, int d, int tau);
  static SpectralDensity Grid(std::vector<double> nodes, std::vector<Mat> values);
  static SpectralDensity Zero(int K);

  Mat eval(double lambda) const;
  // For the seasonal family, the base value (the density divided by the
  // weight); identical to eval for every other family.
  Mat base_eval(double lambda) const;

  int dim() const { return K_; }
  Family family() const { return family_; }
  bool is_seasonal() const { return family_ == Family::seasonal; }
  int seasonal_d() const { return sd_; }
  int seasonal_tau() const { return stau_; }

  // Hermitian + PSD probe on a handful of points; throws param_error.
  void validate(const std::string& name) const;

 private:
  SpectralDensity() = default;
  Family family_ = Family::constant;
  int K_ = 1;
  Mat constant_;
  std::vector<Mat> phi_;
  std::shared_ptr<SpectralDensity> base_;
  int sd_ = 1, stau_ = 1;
  std::vector<double> grid_nodes_;
  std::vector<Mat> grid_values_;
};

// Signal density f plus noise density g under the map to the increment
// domain. Everything the estimation pipeline integrates is expressed through
//   q(l)    = f(l)/w(l) + |1 - e^{i*l*tau}|^{2d} g(l)
// which stays finite and invertible for admissible inputs even where w has
// poles (seasonal f), so no integrand here ever touches a pole.
class CombinedDensity {
 public:
  CombinedDensity(SpectralDensity f, SpectralDensity g, int d, int tau);

  int dim() const { return K_; }
  int d() const { return weight_.d; }
  int tau() const { return weight_.tau; }
  const SpectralDensity& f() const { return f_; }
  const SpectralDensity& g() const { return g_; }
  const SingularWeight& weight() const { return weight_; }

  Mat f_over_w(double lambda) const;   // f/w, stable form
  Mat g_eval(double lambda) const;
  Mat q(double lambda) const;          // increment-domain density
  // Inverse of q via Hermitian eigendecomposition; throws minimality_error
  // when the smallest eigenvalue drops below 1e-12 times the largest.
  Mat q_inv(double lambda) const;
  Mat p(double lambda) const;          // f + l^{2d} g (diagnostic use)

 private:
  SpectralDensity f_, g_;
  SingularWeight weight_;
  int K_ = 1;
};

struct MinimalityReport {
  double value = 0;      // integral of Tr[q^{-1}] over [-pi, pi]
  double drift = 0;      // relative change under node doubling
  bool pass = false;
  std::string reason;
};

// Integrability check for the inverse increment-domain density. Fails when
// the integral is non-finite, q is numerically singular at a node, or the
// value keeps drifting when the grid is doubled (divergence).
MinimalityReport minimality_check(const CombinedDensity& cd, const QuadratureSpec& qs);
void require_minimality(const CombinedDensity& cd, const QuadratureSpec& qs);

// Increment-domain density q(l) as a standalone evaluation.
Mat increment_domain_density(const CombinedDensity& cd, double lambda);

// Fourier coefficient blocks; all depend on l and j through j - l only.
//   fourier_P: (1/2pi) integral e^{il(j-l)} [q^{-1}]^T
//   fourier_T: (1/2pi) integral e^{il(j-l)} [g q^{-1}]^T
//   fourier_Q: (1/2pi) integral e^{il(j-l)} [(f/w) q^{-1} g]^T
Mat fourier_P(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid);
Mat fourier_T(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid);
Mat fourier_Q(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid);

// Per-node integrand caches plus lag-indexed block tables, shared by the
// assembly and the covariance builders.
struct NodeCache {
  SpectralGrid grid;
  std::vector<Mat> q_inv;     // [q^{-1}]
  std::vector<Mat> g;         // g
  std::vector<Mat> f_over_w;  // f/w
  static NodeCache build(const CombinedDensity& cd, const SpectralGrid& grid);
};

// table[h + L - 1] = block for lag h in [-(L-1), L-1].
struct LagTables {
  int L = 0;
  std::vector<Mat> P, T, Q;
  const Mat& P_at(int h) const { return P[h + L - 1]; }
  const Mat& T_at(int h) const { return T[h + L - 1]; }
  const Mat& Q_at(int h) const { return Q[h + L - 1]; }
};
LagTables build_lag_tables(const NodeCache& cache, int L);

}  // namespace perint

#endif
