#ifndef PERINT_INCREMENTS_HPP
#define PERINT_INCREMENTS_HPP

#include <functional>
#include <vector>

#include "perint/basis.hpp"
#include "perint/common.hpp"

namespace perint {

// Order-d increments with integer period multiple tau: the lag operator step
// is tau*T in continuous time and tau segments in block index.
struct IncrementSpec {
  int d = 1;
  int tau = 1;
  double T = 1.0;
  int N = 0;

  void validate() const;
  int padded_blocks() const { return N + tau * d + 1; }  // blocks 0..N+tau*d
};

// Coefficient of x^k in (sum_{j>=0} x^j)^d, i.e. C(k+d-1, d-1). Exact.
long long gen_coeff(int d, int k);

// Coefficient of x^k in (sum_{j>=0} x^{tau*j})^d: gen_coeff(d, k/tau) when
// tau divides k, else 0.
long long gen_coeff_tau(int d, int tau, int k);

// y[m] = sum_{l=0}^d (-1)^l C(d,l) x[m + d*tau - l*tau]; the returned series
// starts at the first index with full history, so y.size() == x.size() - d*tau.
std::vector<double> increment_series(const std::vector<double>& x, int d, int tau);

// Tail-weighted target blocks: b_j = sum_{m=j}^N gen_coeff_tau(m-j) a_m for
// 0 <= j <= N. Input are the N+1 segment blocks of the target.
std::vector<Vec> transform_b(const std::vector<Vec>& a, const IncrementSpec& spec);

// Continuous counterpart on [0, (N+1)T]:
// b(t) = sum_k a(t + tau*T*k) gen_coeff(d, k), the target treated as zero at
// and beyond (N+1)T. Returns an evaluator that is 0 outside [0, (N+1)T).
std::function<double(double)> transform_b_continuous(const SegmentedFunction& a,
                                                     const IncrementSpec& spec);

// Boundary layer on [-tau*T, 0):
// v(t) = sum_{l=1}^{L(t)} (-1)^l C(d,l) b(t + l*tau*T) with
// L(t) = min(ceil(((N+1)T - t)/(tau*T)), d); b treated as zero outside its
// domain.
std::function<double(double)> boundary_v(const std::function<double(double)>& b,
                                         const IncrementSpec& spec);

// Differenced coefficient blocks a^{tau,N}_j, 0 <= j <= N + tau*d:
// a^{tau,N}_j = sum_l (-1)^l C(d,l) a_{j - tau*l} over the l that keep the
// index in [0, N]. Generating identity: their symbol is
// (1 - z^tau)^d * (symbol of a).
std::vector<Vec> incremented_a(const std::vector<Vec>& a, const IncrementSpec& spec);

}  // namespace perint

#endif
