#ifndef PERINT_COMMON_HPP
#define PERINT_COMMON_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace perint {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Error taxonomy, mapped one-to-one onto CLI exit codes.
struct parse_error : std::runtime_error {        // exit 2
  using std::runtime_error::runtime_error;
};
struct param_error : std::runtime_error {        // exit 3
  using std::runtime_error::runtime_error;
};
struct minimality_error : std::runtime_error {   // exit 4
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {      // exit 5
  using std::runtime_error::runtime_error;
};

// Thread budget from PERINT_THREADS (default 1; capped to hardware).
int thread_budget();

// Runs fn(i) for i in [0, n). Splits into contiguous chunks when the thread
// budget allows; results must not depend on execution order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Gauss-Legendre quadrature on [-pi, pi]. Weights sum to 2*pi.
struct SpectralGrid {
  std::vector<double> node;
  std::vector<double> weight;
  int size() const { return static_cast<int>(node.size()); }
  static SpectralGrid legendre(int n);
};

// exp(i*theta)
inline cplx unit_phase(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Exact binomial coefficient; throws param_error on overflow of long long.
long long binomial(int n, int k);

// SplitMix64 step, used to derive per-path RNG substreams.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace perint

#endif
