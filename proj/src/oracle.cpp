#include "perint/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace perint {
namespace {

constexpr double kPi = 3.14159265358979323846;

cplx int_pow(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

// sum_{j,j'} u_j^T R(j - j') conj(v_{j'})
cplx pair_sum(const std::vector<Vec>& u, const std::vector<Vec>& v,
              const std::function<Mat(int)>& R) {
  cplx acc = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    for (std::size_t jp = 0; jp < v.size(); ++jp) {
      acc += (u[j].transpose() * R(static_cast<int>(j) - static_cast<int>(jp)) *
              v[jp].conjugate())(0);
    }
  }
  return acc;
}

std::vector<int> window_indices(int P, int M) {
  std::vector<int> idx;
  idx.reserve(2 * static_cast<std::size_t>(M));
  for (int m = -M; m <= -1; ++m) idx.push_back(m);
  for (int m = P + 1; m <= P + M; ++m) idx.push_back(m);
  return idx;
}

struct ProjectionMoments {
  double var_target = 0;
  std::vector<int> idx;  // window increment indices
  Mat gram;              // E[z z^*] over the window, block form
  Vec cross;             // E[H conj(z_m)] stacked
};

ProjectionMoments projection_moments(const IncrementSpec& inc,
                                     const std::vector<Vec>& a,
                                     const std::vector<Vec>& b,
                                     const CovarianceTable& tab, int M) {
  const int P = inc.N + inc.tau * inc.d;
  const int K = static_cast<int>(a.front().size());
  ProjectionMoments pm;
  pm.idx = window_indices(P, M);

  const auto Rz = [&](int h) -> Mat { return tab.R_z(h); };
  const auto Reta = [&](int h) -> Mat { return tab.R_eta(h); };
  // E[z_{j} eta_{j'}^*] = R_cross(j'-j)^*;  E[eta_j z_{j'}^*] = R_cross(j-j').
  const auto Rzeta = [&](int h) -> Mat { return tab.R_cross(-h).adjoint(); };
  const auto Retaz = [&](int h) -> Mat { return tab.R_cross(h); };

  const cplx var = pair_sum(b, b, Rz) - pair_sum(b, a, Rzeta) -
                   pair_sum(a, b, Retaz) + pair_sum(a, a, Reta);
  pm.var_target = var.real();

  const int n = static_cast<int>(pm.idx.size());
  pm.gram = Mat(n * K, n * K);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      pm.gram.block(r * K, s * K, K, K) = tab.R_z(pm.idx[r] - pm.idx[s]);
    }
  }
  pm.cross = Vec::Zero(n * K);
  for (int r = 0; r < n; ++r) {
    Vec blk = Vec::Zero(K);
    for (std::size_t j = 0; j < b.size(); ++j) {
      blk += tab.R_z(static_cast<int>(j) - pm.idx[r]).transpose() * b[j];
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
      blk -= tab.R_cross(static_cast<int>(j) - pm.idx[r]).transpose() * a[j];
    }
    pm.cross.segment(r * K, K) = blk;
  }
  return pm;
}

double projection_mse(const ProjectionMoments& pm) {
  Eigen::LDLT<Mat> ldlt(pm.gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw numeric_error("oracle: window Gram matrix is not positive definite");
  }
  const Vec y = ldlt.solve(pm.cross.conjugate());
  const double mse = pm.var_target - (pm.cross.transpose() * y)(0).real();
  return mse;
}

struct CounterRng {
  std::uint64_t base;
  std::uint64_t ctr = 0;
  double uniform() {
    const std::uint64_t bits = splitmix64(base + ctr++ * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
  // Standard circularly symmetric complex normal, E|u|^2 = 1.
  cplx normal() {
    double u1 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    return cplx(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
  }
};

}  // namespace

CovarianceTable build_covariance_table(const CombinedDensity& cd, int H,
                                       const QuadratureSpec& qs) {
  if (H < 0) throw param_error("covariance table: H must be >= 0");
  QuadratureSpec sized = qs;
  sized.nodes = std::max(qs.nodes, static_cast<int>(std::ceil(2.5 * H)));
  const SpectralGrid grid = sized.build(cd.tau());
  const int n = grid.size();
  const int K = cd.dim();

  std::vector<Mat> qv(static_cast<std::size_t>(n)), gv(static_cast<std::size_t>(n)),
      cv(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const double x = grid.node[static_cast<int>(i)];
    qv[i] = cd.q(x);
    gv[i] = cd.g_eval(x);
    cv[i] = int_pow(1.0 - unit_phase(x * cd.tau()), cd.d()) * gv[i];
  });

  CovarianceTable tab;
  tab.H = H;
  const int nlags = 2 * H + 1;
  tab.z.assign(static_cast<std::size_t>(nlags), Mat::Zero(K, K));
  tab.eta.assign(static_cast<std::size_t>(nlags), Mat::Zero(K, K));
  tab.cross.assign(static_cast<std::size_t>(nlags), Mat::Zero(K, K));
  parallel_for(static_cast<std::size_t>(nlags), [&](std::size_t idx) {
    const int h = static_cast<int>(idx) - H;
    Mat az = Mat::Zero(K, K), ae = Mat::Zero(K, K), ac = Mat::Zero(K, K);
    for (int i = 0; i < n; ++i) {
      const cplx ph = grid.weight[i] * unit_phase(h * grid.node[i]);
      const std::size_t ui = static_cast<std::size_t>(i);
      az += ph * qv[ui];
      ae += ph * gv[ui];
      ac += ph * cv[ui];
    }
    tab.z[idx] = az / (2.0 * kPi);
    tab.eta[idx] = ae / (2.0 * kPi);
    tab.cross[idx] = ac / (2.0 * kPi);
  });
  return tab;
}

OracleResult oracle_mse(const IncrementSpec& inc, const std::vector<Vec>& a_blocks,
                        const CombinedDensity& cd, std::vector<int> windows,
                        const QuadratureSpec& qs) {
  inc.validate();
  if (windows.empty()) throw param_error("oracle: need at least one window size");
  std::sort(windows.begin(), windows.end());
  if (windows.front() < 1) throw param_error("oracle: window sizes must be >= 1");
  const int P = inc.N + inc.tau * inc.d;
  const int H = P + 2 * windows.back();
  const CovarianceTable tab = build_covariance_table(cd, H, qs);
  const std::vector<Vec> b = transform_b(a_blocks, inc);

  OracleResult res;
  res.windows = windows;
  for (int M : windows) {
    const ProjectionMoments pm = projection_moments(inc, a_blocks, b, tab, M);
    res.var_target = pm.var_target;
    res.mse.push_back(projection_mse(pm));
  }
  res.mse_final = res.mse.back();
  return res;
}

MonteCarloResult monte_carlo_mse(const IncrementSpec& inc, const std::vector<Vec>& a_blocks,
                                 const CombinedDensity& cd, int window, int paths,
                                 std::uint64_t seed, const QuadratureSpec& qs) {
  inc.validate();
  if (window < 1) throw param_error("monte carlo: window must be >= 1");
  if (paths < 2) throw param_error("monte carlo: need at least 2 paths");
  const int P = inc.N + inc.tau * inc.d;
  const CovarianceTable tab = build_covariance_table(cd, P + 2 * window, qs);
  const std::vector<Vec> b = transform_b(a_blocks, inc);
  const ProjectionMoments pm = projection_moments(inc, a_blocks, b, tab, window);

  Eigen::LDLT<Mat> ldlt(pm.gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw numeric_error("monte carlo: window Gram matrix is not positive definite");
  }
  const Vec w = ldlt.solve(pm.cross.conjugate());  // projection coefficients

  // Joint covariance of Y = (z-window, H); the residual is v^T Y with
  // v = (-conj(w), 1), so only the row v^T V sqrt(diag) is needed.
  const int nz = static_cast<int>(pm.gram.rows());
  Mat sigma(nz + 1, nz + 1);
  sigma.topLeftCorner(nz, nz) = pm.gram;
  sigma.topRightCorner(nz, 1) = pm.cross.conjugate();
  sigma.bottomLeftCorner(1, nz) = pm.cross.transpose();
  sigma(nz, nz) = pm.var_target;

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sigma + sigma.adjoint()));
  if (es.info() != Eigen::Success) {
    throw numeric_error("monte carlo: joint covariance eigendecomposition failed");
  }
  const double clip = 1e-12 * std::max(0.0, es.eigenvalues().maxCoeff());
  Vec scale(nz + 1);
  for (int i = 0; i <= nz; ++i) {
    const double e = es.eigenvalues()(i);
    scale(i) = e > clip ? std::sqrt(e) : 0.0;
  }
  Vec v(nz + 1);
  v.head(nz) = -w.conjugate();
  v(nz) = 1.0;
  const Vec row = (v.transpose() * es.eigenvectors()).transpose().cwiseProduct(scale);

  // Sequential accumulation keeps reruns bit-identical.
  double mean = 0, m2 = 0;
  for (int p = 0; p < paths; ++p) {
    CounterRng rng{splitmix64(seed ^ (0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(p) + 1)))};
    cplx err = 0;
    for (int i = 0; i <= nz; ++i) err += row(i) * rng.normal();
    const double val = std::norm(err);
    const double delta = val - mean;
    mean += delta / static_cast<double>(p + 1);
    m2 += delta * (val - mean);
  }
  MonteCarloResult res;
  res.paths = paths;
  res.window = window;
  res.seed = seed;
  res.oracle_mse = projection_mse(pm);
  res.empirical_mse = mean;
  res.stderr_mse = std::sqrt(m2 / (static_cast<double>(paths) - 1.0) / static_cast<double>(paths));
  return res;
}

}  // namespace perint
