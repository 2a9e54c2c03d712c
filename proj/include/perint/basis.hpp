#ifndef PERINT_BASIS_HPP
#define PERINT_BASIS_HPP

#include <functional>
#include <vector>

#include "perint/common.hpp"

namespace perint {

// Truncated harmonic coordinate system on one period [0, T). Component k
// (1-based) is e_k(u) = T^{-1/2} exp(2*pi*i*m(k)*u/T) with the signed
// frequency m(k) below, so the first K components cover frequencies
// 0, 1, -1, 2, -2, ...
struct BasisIndex {
  int K = 5;
  double T = 1.0;

  void validate() const;
};

// m(k) = (-1)^k * floor(k/2) for k >= 1.
int frequency_of(int k);

// Index of the component whose frequency is -m(k): 1 -> 1, 2l -> 2l+1,
// 2l+1 -> 2l.
int conjugate_pair(int k);

// Real-valued function on [0, (N+1)T], zero outside, with per-segment views
// a_j(u) = a(jT + u).
class SegmentedFunction {
 public:
  SegmentedFunction() = default;
  SegmentedFunction(std::function<double(double)> eval, double T, int N);

  // Linear interpolation of uniform or non-uniform samples over
  // [0, (N+1)T]; grid must be strictly increasing and span the domain.
  static SegmentedFunction from_samples(const std::vector<double>& grid,
                                        const std::vector<double>& values,
                                        double T, int N);

  double operator()(double t) const;          // 0 outside [0, (N+1)T]
  double segment(int j, double u) const;      // a(jT + u)
  double T() const { return T_; }
  int segments() const { return N_ + 1; }     // N+1 segments
  double length() const { return T_ * (N_ + 1); }

 private:
  std::function<double(double)> eval_;
  double T_ = 1.0;
  int N_ = 0;
};

// Coordinates of segment j against the first K basis components:
// block[k-1] = T^{-1/2} * integral_0^T a(jT+v) exp(-2*pi*i*m(k)*v/T) dv,
// closed trapezoid rule with quad_nodes intervals.
Vec project_segment(const SegmentedFunction& a, int j, const BasisIndex& basis,
                    int quad_nodes = 512);

// All N+1 segment blocks.
std::vector<Vec> project_all(const SegmentedFunction& a, const BasisIndex& basis,
                             int quad_nodes = 512);

// Pointwise synthesis sum_k block[k-1] e_k(u) for u in [0, T).
cplx reconstruct(const Vec& block, double u, const BasisIndex& basis);

// Synthesis of a whole segmented function at t in [0, (N+1)T); real part of
// the block synthesis on the segment containing t.
double reconstruct_real(const std::vector<Vec>& blocks, double t,
                        const BasisIndex& basis);

}  // namespace perint

#endif
