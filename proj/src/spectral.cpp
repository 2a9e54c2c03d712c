#include "perint/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>

namespace perint {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEigFloor = 1e-12;

double sqr(double x) { return x * x; }

void check_square(const Mat& m, const std::string& name) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw param_error("density '" + name + "': blocks must be square and non-empty");
  }
}

}  // namespace

SpectralGrid QuadratureSpec::build(int tau) const {
  if (nodes < 8) throw param_error("quadrature: need at least 8 nodes");
  if (!(pole_eps > 0)) throw param_error("quadrature: pole_eps must be positive");
  SpectralGrid grid = SpectralGrid::legendre(nodes);
  SingularWeight w{1, tau, 1e-3, pole_eps};
  for (double x : grid.node) {
    if (w.distance_to_pole(x) < pole_eps) {
      throw param_error("quadrature: node within pole_eps of a weight pole");
    }
  }
  return grid;
}

double SingularWeight::distance_to_pole(double lambda) const {
  if (tau < 2) return std::numeric_limits<double>::infinity();
  const double step = 2.0 * kPi / tau;
  const long long m0 = std::llround(lambda / step);
  double best = std::numeric_limits<double>::infinity();
  for (long long m = m0 - 1; m <= m0 + 1; ++m) {
    if (m == 0) continue;
    best = std::min(best, std::abs(lambda - static_cast<double>(m) * step));
  }
  return best;
}

double SingularWeight::operator()(double lambda) const {
  if (distance_to_pole(lambda) < pole_eps) {
    throw numeric_error("weight evaluated within pole_eps of a pole");
  }
  if (lambda == 0.0) return std::pow(static_cast<double>(tau), -2.0 * d);
  if (std::abs(lambda) < lambda_switch) {
    const double r = lambda / (2.0 * std::sin(0.5 * lambda * tau));
    return std::pow(r * r, d);
  }
  const double s2 = 4.0 * sqr(std::sin(0.5 * lambda * tau));
  return std::pow(lambda * lambda / s2, d);
}

double SingularWeight::inverse(double lambda) const {
  if (lambda == 0.0) return std::pow(static_cast<double>(tau), 2.0 * d);
  if (std::abs(lambda) < lambda_switch) {
    const double r = 2.0 * std::sin(0.5 * lambda * tau) / lambda;
    return std::pow(r * r, d);
  }
  const double s2 = 4.0 * sqr(std::sin(0.5 * lambda * tau));
  return std::pow(s2 / (lambda * lambda), d);
}

SpectralDensity SpectralDensity::Constant(Mat value) {
  check_square(value, "constant");
  SpectralDensity s;
  s.family_ = Family::constant;
  s.K_ = static_cast<int>(value.rows());
  s.constant_ = std::move(value);
  return s;
}

SpectralDensity SpectralDensity::Factor(std::vector<Mat> phi) {
  if (phi.empty()) throw param_error("density 'factor': needs at least one coefficient");
  for (const Mat& m : phi) check_square(m, "factor");
  SpectralDensity s;
  s.family_ = Family::factor;
  s.K_ = static_cast<int>(phi.front().rows());
  for (const Mat& m : phi) {
    if (m.rows() != s.K_) throw param_error("density 'factor': coefficient sizes differ");
  }
  s.phi_ = std::move(phi);
  return s;
}

SpectralDensity SpectralDensity::Seasonal(SpectralDensity base, int d, int tau) {
  if (base.is_seasonal()) throw param_error("density 'seasonal': base may not be seasonal");
  if (d < 1 || tau < 1) throw param_error("density 'seasonal': requires d >= 1 and tau >= 1");
  SpectralDensity s;
  s.family_ = Family::seasonal;
  s.K_ = base.dim();
  s.base_ = std::make_shared<SpectralDensity>(std::move(base));
  s.sd_ = d;
  s.stau_ = tau;
  return s;
}

SpectralDensity SpectralDensity::Grid(std::vector<double> nodes, std::vector<Mat> values) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw param_error("density 'grid': need matching node/value lists, at least two entries");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw param_error("density 'grid': nodes must increase");
  }
  if (nodes.front() < -kPi - 1e-9 || nodes.back() > kPi + 1e-9) {
    throw param_error("density 'grid': nodes must lie in [-pi, pi]");
  }
  for (const Mat& m : values) check_square(m, "grid");
  SpectralDensity s;
  s.family_ = Family::grid;
  s.K_ = static_cast<int>(values.front().rows());
  for (const Mat& m : values) {
    if (m.rows() != s.K_) throw param_error("density 'grid': value sizes differ");
  }
  s.grid_nodes_ = std::move(nodes);
  s.grid_values_ = std::move(values);
  return s;
}

SpectralDensity SpectralDensity::Zero(int K) {
  return Constant(Mat::Zero(K, K));
}

Mat SpectralDensity::base_eval(double lambda) const {
  switch (family_) {
    case Family::constant:
      return constant_;
    case Family::factor: {
      Mat phi = Mat::Zero(K_, K_);
      for (std::size_t m = 0; m < phi_.size(); ++m) {
        phi += unit_phase(lambda * static_cast<double>(m)) * phi_[m];
      }
      return phi * phi.adjoint();
    }
    case Family::seasonal:
      return base_->eval(lambda);
    case Family::grid: {
      if (lambda <= grid_nodes_.front()) return grid_values_.front();
      if (lambda >= grid_nodes_.back()) return grid_values_.back();
      const auto it = std::upper_bound(grid_nodes_.begin(), grid_nodes_.end(), lambda);
      const std::size_t hi = static_cast<std::size_t>(it - grid_nodes_.begin());
      const std::size_t lo = hi - 1;
      const double t = (lambda - grid_nodes_[lo]) / (grid_nodes_[hi] - grid_nodes_[lo]);
      return (1.0 - t) * grid_values_[lo] + t * grid_values_[hi];
    }
  }
  throw numeric_error("unreachable density family");
}

Mat SpectralDensity::eval(double lambda) const {
  if (family_ == Family::seasonal) {
    SingularWeight w{sd_, stau_};
    return w(lambda) * base_->eval(lambda);
  }
  return base_eval(lambda);
}

void SpectralDensity::validate(const std::string& name) const {
  static const double probes[] = {0.0, 0.1234567, -1.0517, 2.531, -2.8837, 3.0911, 0.5};
  for (double x : probes) {
    const Mat v = base_eval(x);
    const double scale = 1.0 + v.cwiseAbs().maxCoeff();
    if ((v - v.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw param_error("density '" + name + "': not Hermitian at lambda=" + std::to_string(x));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (v + v.adjoint()));
    if (es.info() != Eigen::Success) {
      throw param_error("density '" + name + "': eigendecomposition failed");
    }
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
      throw param_error("density '" + name + "': negative eigenvalue at lambda=" + std::to_string(x));
    }
  }
}

CombinedDensity::CombinedDensity(SpectralDensity f, SpectralDensity g, int d, int tau)
    : f_(std::move(f)), g_(std::move(g)) {
  if (d < 1) throw param_error("model: d must be >= 1");
  if (tau < 1) throw param_error("model: tau must be >= 1");
  if (f_.dim() != g_.dim()) throw param_error("model: f and g dimensions differ");
  K_ = f_.dim();
  weight_ = SingularWeight{d, tau};
  if (g_.is_seasonal()) {
    throw param_error("model: seasonal family is signal-only; the noise covariance would not be finite");
  }
  if (f_.is_seasonal() && (f_.seasonal_d() != d || f_.seasonal_tau() != tau)) {
    throw param_error("model: seasonal signal density must use the model's (d, tau)");
  }
}

Mat CombinedDensity::f_over_w(double lambda) const {
  if (f_.is_seasonal()) return f_.base_eval(lambda);
  return weight_.inverse(lambda) * f_.eval(lambda);
}

Mat CombinedDensity::g_eval(double lambda) const { return g_.eval(lambda); }

Mat CombinedDensity::q(double lambda) const {
  const double s2 = 4.0 * sqr(std::sin(0.5 * lambda * weight_.tau));
  return f_over_w(lambda) + std::pow(s2, weight_.d) * g_.eval(lambda);
}

Mat CombinedDensity::q_inv(double lambda) const {
  const Mat qm = q(lambda);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (qm + qm.adjoint()));
  if (es.info() != Eigen::Success) {
    throw numeric_error("q eigendecomposition failed");
  }
  const auto& ev = es.eigenvalues();
  const double emax = ev.maxCoeff();
  if (!(emax > 0) || ev.minCoeff() < kEigFloor * emax) {
    std::ostringstream os;
    os << "increment-domain density is singular at lambda=" << lambda;
    throw minimality_error(os.str());
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat CombinedDensity::p(double lambda) const {
  return f_.eval(lambda) + std::pow(lambda * lambda, weight_.d) * g_.eval(lambda);
}

Mat increment_domain_density(const CombinedDensity& cd, double lambda) {
  return cd.q(lambda);
}

namespace {

double trace_qinv_integral(const CombinedDensity& cd, const SpectralGrid& grid) {
  double acc = 0;
  for (int i = 0; i < grid.size(); ++i) {
    acc += grid.weight[i] * cd.q_inv(grid.node[i]).real().trace();
  }
  return acc;
}

}  // namespace

MinimalityReport minimality_check(const CombinedDensity& cd, const QuadratureSpec& qs) {
  MinimalityReport rep;
  try {
    const double coarse = trace_qinv_integral(cd, qs.build(cd.tau()));
    QuadratureSpec fine = qs;
    fine.nodes = qs.nodes * 2;
    const double refined = trace_qinv_integral(cd, fine.build(cd.tau()));
    rep.value = refined;
    rep.drift = std::abs(refined - coarse) / std::max(1.0, std::abs(refined));
    if (!std::isfinite(refined) || !std::isfinite(coarse)) {
      rep.pass = false;
      rep.reason = "integral of Tr[q^{-1}] is not finite";
    } else if (rep.drift >= 0.02) {
      rep.pass = false;
      rep.reason = "integral of Tr[q^{-1}] keeps growing under grid refinement";
    } else {
      rep.pass = true;
    }
  } catch (const minimality_error& e) {
    rep.pass = false;
    rep.reason = e.what();
  }
  return rep;
}

void require_minimality(const CombinedDensity& cd, const QuadratureSpec& qs) {
  const MinimalityReport rep = minimality_check(cd, qs);
  if (!rep.pass) throw minimality_error("minimality check failed: " + rep.reason);
}

namespace {

template <typename Integrand>
Mat lag_integral(int h, int K, const SpectralGrid& grid, Integrand&& integrand) {
  Mat acc = Mat::Zero(K, K);
  for (int i = 0; i < grid.size(); ++i) {
    acc += grid.weight[i] * unit_phase(h * grid.node[i]) * integrand(i);
  }
  return acc / (2.0 * kPi);
}

}  // namespace

Mat fourier_P(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid) {
  return lag_integral(j - l, cd.dim(), grid, [&](int i) -> Mat {
    return cd.q_inv(grid.node[i]).transpose();
  });
}

Mat fourier_T(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid) {
  return lag_integral(j - l, cd.dim(), grid, [&](int i) -> Mat {
    const double x = grid.node[i];
    return (cd.g_eval(x) * cd.q_inv(x)).transpose();
  });
}

Mat fourier_Q(int l, int j, const CombinedDensity& cd, const SpectralGrid& grid) {
  return lag_integral(j - l, cd.dim(), grid, [&](int i) -> Mat {
    const double x = grid.node[i];
    return (cd.f_over_w(x) * cd.q_inv(x) * cd.g_eval(x)).transpose();
  });
}

NodeCache NodeCache::build(const CombinedDensity& cd, const SpectralGrid& grid) {
  NodeCache cache;
  cache.grid = grid;
  const std::size_t n = static_cast<std::size_t>(grid.size());
  cache.q_inv.resize(n);
  cache.g.resize(n);
  cache.f_over_w.resize(n);
  // q_inv can throw inside worker threads; capture one exception and rethrow.
  std::exception_ptr err;
  std::mutex err_mutex;
  parallel_for(n, [&](std::size_t i) {
    try {
      const double x = grid.node[i];
      cache.q_inv[i] = cd.q_inv(x);
      cache.g[i] = cd.g_eval(x);
      cache.f_over_w[i] = cd.f_over_w(x);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);
  return cache;
}

LagTables build_lag_tables(const NodeCache& cache, int L) {
  if (L < 1) throw param_error("lag tables: L must be >= 1");
  const int K = static_cast<int>(cache.q_inv.front().rows());
  const int nlags = 2 * L - 1;
  LagTables tables;
  tables.L = L;
  tables.P.assign(nlags, Mat::Zero(K, K));
  tables.T.assign(nlags, Mat::Zero(K, K));
  tables.Q.assign(nlags, Mat::Zero(K, K));
  const int n = cache.grid.size();
  std::vector<Mat> Pint(n), Tint(n), Qint(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Pint[i] = cache.q_inv[i].transpose();
    Tint[i] = (cache.g[i] * cache.q_inv[i]).transpose();
    Qint[i] = (cache.f_over_w[i] * cache.q_inv[i] * cache.g[i]).transpose();
  });
  parallel_for(static_cast<std::size_t>(nlags), [&](std::size_t idx) {
    const int h = static_cast<int>(idx) - (L - 1);
    Mat accP = Mat::Zero(K, K), accT = Mat::Zero(K, K), accQ = Mat::Zero(K, K);
    for (int i = 0; i < n; ++i) {
      const cplx ph = unit_phase(h * cache.grid.node[i]);
      accP += ph * Pint[i];
      accT += ph * Tint[i];
      accQ += ph * Qint[i];
    }
    tables.P[idx] = accP / (2.0 * kPi);
    tables.T[idx] = accT / (2.0 * kPi);
    tables.Q[idx] = accQ / (2.0 * kPi);
  });
  return tables;
}

}  // namespace perint
