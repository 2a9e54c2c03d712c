#ifndef PERINT_ENGINE_HPP
#define PERINT_ENGINE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "perint/basis.hpp"
#include "perint/common.hpp"
#include "perint/increments.hpp"
#include "perint/spectral.hpp"

namespace perint {

struct EngineOptions {
  QuadratureSpec quad;
  bool check_minimality = true;
};

// Solved interpolation problem for the functional sum_j a_j^T xi_j over the
// unobserved blocks j = 0..N, estimated from the observed d-th increments of
// signal plus noise. P is the last padded block index, N + tau*d.
struct Solution {
  IncrementSpec inc;
  int K = 1;
  std::shared_ptr<const CombinedDensity> density;
  SpectralGrid grid;

  std::vector<Vec> a;       // target blocks, 0..N
  std::vector<Vec> b_pad;   // increment-domain target blocks, 0..P (zero past N)
  std::vector<Vec> a_tau;   // incremented target blocks, 0..P
  std::vector<Vec> v;       // left-boundary correction blocks, index -tau*d..-1
  std::vector<Vec> c;       // gap polynomial blocks, 0..P
  std::vector<Vec> c1, c2;  // c = c1 - c2 split by target/noise source

  Mat P_full, T_full;       // (P+1)K square, block (l,j) keyed by lag j-l
  Mat Q_full;               // (N+1)K square, block (m,j) keyed by lag j-m
  Vec rhs;                  // flattened b_pad - T_full * a_tau

  double mse = 0;           // quadratic-form value
  double mse_spectral = 0;  // independent integral form of the same quantity

  int P() const { return inc.N + inc.tau * inc.d; }

  // Trigonometric symbols of the stored coefficient blocks.
  Vec target_symbol(double lambda) const;      // A(l), blocks a
  Vec b_symbol(double lambda) const;           // B(l), blocks b_pad
  Vec a_tau_symbol(double lambda) const;       // (1 - e^{il tau})^d A(l)
  Vec gap_symbol(double lambda) const;         // C(l), blocks c
  Vec cf_symbol(double lambda) const;          // conj(g) A_tau + C
  Vec cg_symbol(double lambda) const;          // conj(f/w) A - (1 - e^{-il tau})^d C

  // Scale factor mapping increment-domain symbols to the estimate
  // characteristic: ((1 - e^{-il tau})/(il))^d, finite limit tau^d at 0.
  cplx beta(double lambda) const;

  Vec characteristic(double lambda) const;     // h = beta (B - q^{-T} C^f)
  Vec characteristic_h1(double lambda) const;  // target-driven part
  Vec characteristic_h2(double lambda) const;  // noise-driven part, h = h1 - h2
};

Solution solve_interpolation(const IncrementSpec& inc, std::vector<Vec> a_blocks,
                             const CombinedDensity& density, const EngineOptions& opt);

// Residuals of the two optimality conditions, recomputed by fresh quadrature
// of the defining integrands (not by reusing the solved linear algebra).
// inside[l], l = 0..P: block l of  b_pad - (1/2pi) integral e^{-i l lambda} q^{-T} C^f.
// outside[i]: the same integrand paired against an observed index, for
// m = -window..-1 and P+1..P+window.
struct OrthogonalityReport {
  std::vector<double> inside;
  std::vector<double> outside;
  double max_inside = 0;
  double max_outside = 0;
  double scale = 1;
};
OrthogonalityReport orthogonality_residuals(const Solution& sol, int window = 8);

// Mean-square error attained by an arbitrary estimate characteristic h
// against the density pair (f, g); the solved characteristic minimises this
// over valid h at the solution's own densities.
double delta_functional(const std::function<Vec(double)>& h,
                        const std::vector<Vec>& a_blocks, const IncrementSpec& inc,
                        const SpectralDensity& f, const SpectralDensity& g,
                        const SpectralGrid& grid);

}  // namespace perint

#endif
