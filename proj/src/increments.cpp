#include "perint/increments.hpp"

#include <cmath>

namespace perint {

void IncrementSpec::validate() const {
  if (d < 1) throw param_error("increment order d must be >= 1");
  if (tau < 1) throw param_error("increment step multiple tau must be >= 1");
  if (!(T > 0)) throw param_error("period T must be positive");
  if (N < 0) throw param_error("observation gap length N must be >= 0");
}

long long gen_coeff(int d, int k) {
  if (d < 1) throw param_error("gen_coeff needs d >= 1");
  if (k < 0) throw param_error("gen_coeff needs k >= 0");
  return binomial(k + d - 1, d - 1);
}

long long gen_coeff_tau(int d, int tau, int k) {
  if (tau < 1) throw param_error("gen_coeff_tau needs tau >= 1");
  if (k < 0) throw param_error("gen_coeff_tau needs k >= 0");
  if (k % tau != 0) return 0;
  return gen_coeff(d, k / tau);
}

std::vector<double> increment_series(const std::vector<double>& x, int d, int tau) {
  if (d < 1 || tau < 1) throw param_error("increment_series needs d >= 1, tau >= 1");
  const int lag = d * tau;
  if (static_cast<int>(x.size()) <= lag)
    throw param_error("series too short for the requested increment depth");
  std::vector<double> y(x.size() - lag);
  for (std::size_t m = 0; m < y.size(); ++m) {
    double s = 0;
    for (int l = 0; l <= d; ++l) {
      const double c = static_cast<double>(binomial(d, l));
      s += ((l % 2 == 0) ? c : -c) * x[m + lag - static_cast<std::size_t>(l) * tau];
    }
    y[m] = s;
  }
  return y;
}

std::vector<Vec> transform_b(const std::vector<Vec>& a, const IncrementSpec& spec) {
  spec.validate();
  if (static_cast<int>(a.size()) != spec.N + 1)
    throw param_error("transform_b expects N+1 target blocks");
  std::vector<Vec> b(a.size());
  for (int j = 0; j <= spec.N; ++j) {
    Vec s = Vec::Zero(a[0].size());
    for (int m = j; m <= spec.N; ++m)
      s += static_cast<double>(gen_coeff_tau(spec.d, spec.tau, m - j)) * a[m];
    b[j] = s;
  }
  return b;
}

std::function<double(double)> transform_b_continuous(const SegmentedFunction& a,
                                                     const IncrementSpec& spec) {
  spec.validate();
  const double span = spec.T * (spec.N + 1);
  const double step = spec.tau * spec.T;
  const int d = spec.d;
  return [a, span, step, d](double t) -> double {
    if (t < 0 || t >= span) return 0.0;
    double s = 0;
    const int kmax = static_cast<int>(std::ceil((span - t) / step));
    for (int k = 0; k <= kmax; ++k) {
      const double u = t + step * k;
      if (u >= span) break;  // zero extension from the right end of the gap on
      s += a(u) * static_cast<double>(gen_coeff(d, k));
    }
    return s;
  };
}

std::function<double(double)> boundary_v(const std::function<double(double)>& b,
                                         const IncrementSpec& spec) {
  spec.validate();
  const double span = spec.T * (spec.N + 1);
  const double step = spec.tau * spec.T;
  const int d = spec.d;
  return [b, span, step, d](double t) -> double {
    if (t < -step || t >= 0) return 0.0;
    const int lmin = static_cast<int>(std::ceil(-t / step));  // always 1 here
    const int lmax = std::min(static_cast<int>(std::ceil((span - t) / step)), d);
    double s = 0;
    for (int l = std::max(lmin, 1); l <= lmax; ++l) {
      const double u = t + l * step;
      if (u < 0 || u >= span) continue;  // b vanishes outside [0, (N+1)T)
      const double c = static_cast<double>(binomial(d, l));
      s += ((l % 2 == 0) ? c : -c) * b(u);
    }
    return s;
  };
}

std::vector<Vec> incremented_a(const std::vector<Vec>& a, const IncrementSpec& spec) {
  spec.validate();
  if (static_cast<int>(a.size()) != spec.N + 1)
    throw param_error("incremented_a expects N+1 target blocks");
  std::vector<Vec> out(spec.padded_blocks());
  for (int j = 0; j <= spec.N + spec.tau * spec.d; ++j) {
    Vec s = Vec::Zero(a[0].size());
    const int lmin = std::max((j - spec.N + spec.tau - 1) / spec.tau, 0);  // ceil((j-N)/tau)
    const int lmax = std::min(j / spec.tau, spec.d);
    for (int l = lmin; l <= lmax; ++l) {
      const int idx = j - spec.tau * l;
      if (idx < 0 || idx > spec.N) continue;
      const double c = static_cast<double>(binomial(spec.d, l));
      s += ((l % 2 == 0) ? c : -c) * a[idx];
    }
    out[j] = s;
  }
  return out;
}

}  // namespace perint
