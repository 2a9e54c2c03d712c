#include "perint/engine.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

namespace perint {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEigFloor = 1e-12;
constexpr double kBetaSwitch = 1e-6;

Vec block_symbol(const std::vector<Vec>& blocks, double lambda) {
  Vec s = Vec::Zero(blocks.front().size());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    s += unit_phase(lambda * static_cast<double>(j)) * blocks[j];
  }
  return s;
}

Vec flatten(const std::vector<Vec>& blocks) {
  const int K = static_cast<int>(blocks.front().size());
  Vec out(static_cast<int>(blocks.size()) * K);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out.segment(static_cast<int>(j) * K, K) = blocks[j];
  }
  return out;
}

std::vector<Vec> unflatten(const Vec& v, int K) {
  std::vector<Vec> out(static_cast<std::size_t>(v.size() / K));
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = v.segment(static_cast<int>(j) * K, K);
  }
  return out;
}

cplx int_pow(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

cplx beta_factor(double lambda, int d, int tau) {
  cplx base;
  if (std::abs(lambda) < kBetaSwitch) {
    const double t = static_cast<double>(tau);
    base = t * cplx(1.0 - lambda * lambda * t * t / 6.0, -0.5 * lambda * t);
  } else {
    base = (1.0 - unit_phase(-lambda * tau)) / cplx(0.0, lambda);
  }
  return int_pow(base, d);
}

// (1 - e^{i l tau})^d
cplx increment_symbol(double lambda, int d, int tau) {
  return int_pow(1.0 - unit_phase(lambda * tau), d);
}

}  // namespace

Vec Solution::target_symbol(double lambda) const { return block_symbol(a, lambda); }
Vec Solution::b_symbol(double lambda) const { return block_symbol(b_pad, lambda); }
Vec Solution::gap_symbol(double lambda) const { return block_symbol(c, lambda); }

Vec Solution::a_tau_symbol(double lambda) const {
  return increment_symbol(lambda, inc.d, inc.tau) * target_symbol(lambda);
}

Vec Solution::cf_symbol(double lambda) const {
  return density->g_eval(lambda).conjugate() * a_tau_symbol(lambda) + gap_symbol(lambda);
}

Vec Solution::cg_symbol(double lambda) const {
  return density->f_over_w(lambda).conjugate() * target_symbol(lambda) -
         int_pow(1.0 - unit_phase(-lambda * inc.tau), inc.d) * gap_symbol(lambda);
}

cplx Solution::beta(double lambda) const { return beta_factor(lambda, inc.d, inc.tau); }

Vec Solution::characteristic(double lambda) const {
  const Mat qinv_t = density->q_inv(lambda).transpose();
  return beta(lambda) * (b_symbol(lambda) - qinv_t * cf_symbol(lambda));
}

Vec Solution::characteristic_h1(double lambda) const {
  const Mat qinv_t = density->q_inv(lambda).transpose();
  return beta(lambda) * (b_symbol(lambda) - qinv_t * block_symbol(c1, lambda));
}

Vec Solution::characteristic_h2(double lambda) const {
  const Mat qinv_t = density->q_inv(lambda).transpose();
  const Vec inner = density->g_eval(lambda).conjugate() * a_tau_symbol(lambda) -
                    block_symbol(c2, lambda);
  return beta(lambda) * (qinv_t * inner);
}

Solution solve_interpolation(const IncrementSpec& inc, std::vector<Vec> a_blocks,
                             const CombinedDensity& density, const EngineOptions& opt) {
  inc.validate();
  if (static_cast<int>(a_blocks.size()) != inc.N + 1) {
    throw param_error("engine: expected N+1 target blocks");
  }
  const int K = static_cast<int>(a_blocks.front().size());
  if (K < 1 || K != density.dim()) {
    throw param_error("engine: target block size must match the density dimension");
  }
  for (const Vec& blk : a_blocks) {
    if (static_cast<int>(blk.size()) != K) throw param_error("engine: ragged target blocks");
  }
  if (inc.d != density.d() || inc.tau != density.tau()) {
    throw param_error("engine: increment parameters disagree with the density pair");
  }
  if (opt.check_minimality) require_minimality(density, opt.quad);

  Solution sol;
  sol.inc = inc;
  sol.K = K;
  sol.density = std::make_shared<CombinedDensity>(density);
  sol.grid = opt.quad.build(inc.tau);
  sol.a = std::move(a_blocks);

  const int P = sol.P();
  sol.b_pad = transform_b(sol.a, inc);
  sol.b_pad.resize(static_cast<std::size_t>(P) + 1, Vec::Zero(K));
  sol.a_tau = incremented_a(sol.a, inc);

  // Left-boundary correction blocks v_m, m = -tau*d..-1, stored ascending.
  sol.v.assign(static_cast<std::size_t>(inc.tau * inc.d), Vec::Zero(K));
  for (int m = -inc.tau * inc.d; m <= -1; ++m) {
    Vec s = Vec::Zero(K);
    for (int l = 1; l <= inc.d; ++l) {
      const int j = m + l * inc.tau;
      if (j < 0 || j > P) continue;
      const double coeff = (l % 2 ? -1.0 : 1.0) * static_cast<double>(binomial(inc.d, l));
      s += coeff * sol.b_pad[j];
    }
    sol.v[static_cast<std::size_t>(m + inc.tau * inc.d)] = s;
  }

  const NodeCache cache = NodeCache::build(density, sol.grid);
  const LagTables tables = build_lag_tables(cache, P + 1);

  const int np = (P + 1) * K;
  const int nq = (inc.N + 1) * K;
  sol.P_full = Mat::Zero(np, np);
  sol.T_full = Mat::Zero(np, np);
  sol.Q_full = Mat::Zero(nq, nq);
  for (int l = 0; l <= P; ++l) {
    for (int j = 0; j <= P; ++j) {
      sol.P_full.block(l * K, j * K, K, K) = tables.P_at(j - l);
      sol.T_full.block(l * K, j * K, K, K) = tables.T_at(j - l);
    }
  }
  for (int m = 0; m <= inc.N; ++m) {
    for (int j = 0; j <= inc.N; ++j) {
      sol.Q_full.block(m * K, j * K, K, K) = tables.Q_at(j - m);
    }
  }

  const Vec b_flat = flatten(sol.b_pad);
  const Vec atau_flat = flatten(sol.a_tau);
  const Vec noise_flat = sol.T_full * atau_flat;
  sol.rhs = b_flat - noise_flat;

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sol.P_full + sol.P_full.adjoint()));
  if (es.info() != Eigen::Success) {
    throw numeric_error("engine: eigendecomposition of the system matrix failed");
  }
  const auto& ev = es.eigenvalues();
  const double emax = ev.maxCoeff();
  if (!(emax > 0) || ev.minCoeff() < kEigFloor * emax) {
    throw numeric_error("engine: interpolation system is numerically singular");
  }
  const auto apply_inv = [&](const Vec& y) -> Vec {
    return es.eigenvectors() *
           (ev.cwiseInverse().asDiagonal() * (es.eigenvectors().adjoint() * y));
  };
  const Vec c1_flat = apply_inv(b_flat);
  const Vec c2_flat = apply_inv(noise_flat);
  sol.c1 = unflatten(c1_flat, K);
  sol.c2 = unflatten(c2_flat, K);
  sol.c = unflatten(c1_flat - c2_flat, K);

  const Vec a_flat = flatten(sol.a);
  sol.mse = (sol.rhs.dot(c1_flat - c2_flat)).real() + (a_flat.dot(sol.Q_full * a_flat)).real();

  // Independent spectral form of the same error, through the solved symbols.
  double acc = 0;
  for (int i = 0; i < sol.grid.size(); ++i) {
    const double x = sol.grid.node[i];
    const Vec cf = sol.cf_symbol(x);
    const Vec cg = sol.cg_symbol(x);
    const Mat& qinv = cache.q_inv[static_cast<std::size_t>(i)];
    const Mat& g = cache.g[static_cast<std::size_t>(i)];
    const Mat& fw = cache.f_over_w[static_cast<std::size_t>(i)];
    const cplx t1 = (cf.transpose() * (qinv * (fw * (qinv * cf.conjugate()))))(0);
    const cplx t2 = (cg.transpose() * (qinv * (g * (qinv * cg.conjugate()))))(0);
    acc += sol.grid.weight[i] * (t1 + t2).real();
  }
  sol.mse_spectral = acc / (2.0 * kPi);
  return sol;
}

OrthogonalityReport orthogonality_residuals(const Solution& sol, int window) {
  const int P = sol.P();
  const int K = sol.K;
  const NodeCache cache = NodeCache::build(*sol.density, sol.grid);
  const int n = sol.grid.size();

  // Per-node symbol values, shared by every residual index.
  std::vector<Vec> bsym(static_cast<std::size_t>(n)), inner(static_cast<std::size_t>(n)),
      outer(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = sol.grid.node[i];
    const std::size_t ui = static_cast<std::size_t>(i);
    const Vec cf = sol.cf_symbol(x);
    const Vec atau = sol.a_tau_symbol(x);
    bsym[ui] = sol.b_symbol(x);
    const Vec psi = cache.q_inv[ui].transpose() * cf;
    inner[ui] = bsym[ui] - psi;
    const double s2 = 4.0 * std::pow(std::sin(0.5 * x * sol.inc.tau), 2.0);
    const Mat q = cache.f_over_w[ui] + std::pow(s2, sol.inc.d) * cache.g[ui];
    outer[ui] = q.transpose() * psi - cache.g[ui].conjugate() * atau;
  }

  const auto fourier_norm = [&](const std::vector<Vec>& vals, int m) {
    Vec acc = Vec::Zero(K);
    for (int i = 0; i < n; ++i) {
      acc += sol.grid.weight[i] * unit_phase(-m * sol.grid.node[i]) *
             vals[static_cast<std::size_t>(i)];
    }
    return (acc / (2.0 * kPi)).cwiseAbs().maxCoeff();
  };

  OrthogonalityReport rep;
  for (int l = 0; l <= P; ++l) rep.inside.push_back(fourier_norm(inner, l));
  for (int m = -window; m <= -1; ++m) rep.outside.push_back(fourier_norm(outer, m));
  for (int m = P + 1; m <= P + window; ++m) rep.outside.push_back(fourier_norm(outer, m));
  rep.max_inside = *std::max_element(rep.inside.begin(), rep.inside.end());
  rep.max_outside = *std::max_element(rep.outside.begin(), rep.outside.end());
  double bmax = 0, amax = 0;
  for (const Vec& blk : sol.b_pad) bmax = std::max(bmax, blk.cwiseAbs().maxCoeff());
  for (const Vec& blk : sol.a_tau) amax = std::max(amax, blk.cwiseAbs().maxCoeff());
  rep.scale = 1.0 + bmax + amax;
  return rep;
}

double delta_functional(const std::function<Vec(double)>& h,
                        const std::vector<Vec>& a_blocks, const IncrementSpec& inc,
                        const SpectralDensity& f, const SpectralDensity& g,
                        const SpectralGrid& grid) {
  inc.validate();
  std::vector<Vec> b_pad = transform_b(a_blocks, inc);
  b_pad.resize(static_cast<std::size_t>(inc.N + inc.tau * inc.d) + 1,
               Vec::Zero(a_blocks.front().size()));
  double acc = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node[i];
    const Vec A = block_symbol(a_blocks, x);
    const Vec psi = beta_factor(x, inc.d, inc.tau) * block_symbol(b_pad, x) - h(x);
    const Mat gv = g.eval(x);
    const Mat pv = f.eval(x) + std::pow(x * x, inc.d) * gv;
    const cplx il_d = int_pow(cplx(0.0, x), inc.d);
    const cplx t1 = (psi.transpose() * (pv * psi.conjugate()))(0);
    const cplx t2 = (A.transpose() * (gv * A.conjugate()))(0);
    const cplx t3 = -il_d * (psi.transpose() * (gv * A.conjugate()))(0);
    const cplx t4 = -std::conj(il_d) * (A.transpose() * (gv * psi.conjugate()))(0);
    acc += grid.weight[i] * (t1 + t2 + t3 + t4).real();
  }
  return acc / (2.0 * kPi);
}

}  // namespace perint
