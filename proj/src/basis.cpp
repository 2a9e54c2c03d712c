#include "perint/basis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace perint {

void BasisIndex::validate() const {
  if (K < 1) throw param_error("basis truncation K must be >= 1");
  if (!(T > 0)) throw param_error("period T must be positive");
}

int frequency_of(int k) {
  if (k < 1) throw param_error("basis components are indexed from 1");
  int half = k / 2;
  return (k % 2 == 0) ? half : -half;
}

int conjugate_pair(int k) {
  if (k < 1) throw param_error("basis components are indexed from 1");
  if (k == 1) return 1;
  return (k % 2 == 0) ? k + 1 : k - 1;
}

SegmentedFunction::SegmentedFunction(std::function<double(double)> eval,
                                     double T, int N)
    : eval_(std::move(eval)), T_(T), N_(N) {
  if (!(T > 0)) throw param_error("period T must be positive");
  if (N < 0) throw param_error("segment count N must be >= 0");
}

SegmentedFunction SegmentedFunction::from_samples(
    const std::vector<double>& grid, const std::vector<double>& values,
    double T, int N) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw param_error("sampled function needs matching grid/value arrays with >= 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw param_error("sample grid must be strictly increasing");
  const double span = T * (N + 1);
  if (grid.front() > 1e-12 * span || grid.back() < span * (1 - 1e-12))
    throw param_error("sample grid must span [0, (N+1)T]");
  auto g = std::make_shared<std::vector<double>>(grid);
  auto v = std::make_shared<std::vector<double>>(values);
  auto eval = [g, v](double t) {
    auto it = std::upper_bound(g->begin(), g->end(), t);
    if (it == g->begin()) return v->front();
    if (it == g->end()) return v->back();
    std::size_t i = static_cast<std::size_t>(it - g->begin());
    double t0 = (*g)[i - 1], t1 = (*g)[i];
    double s = (t - t0) / (t1 - t0);
    return (1 - s) * (*v)[i - 1] + s * (*v)[i];
  };
  return SegmentedFunction(eval, T, N);
}

double SegmentedFunction::operator()(double t) const {
  if (t < 0 || t > length()) return 0.0;
  return eval_(t);
}

double SegmentedFunction::segment(int j, double u) const {
  return (*this)(j * T_ + u);
}

Vec project_segment(const SegmentedFunction& a, int j, const BasisIndex& basis,
                    int quad_nodes) {
  basis.validate();
  if (quad_nodes < 2) throw param_error("projection quadrature needs >= 2 intervals");
  if (j < 0 || j >= a.segments()) throw param_error("segment index out of range");
  const double T = basis.T;
  const double h = T / quad_nodes;
  const double root = 1.0 / std::sqrt(T);
  Vec block = Vec::Zero(basis.K);
  for (int i = 0; i <= quad_nodes; ++i) {
    const double u = i * h;
    const double w = (i == 0 || i == quad_nodes) ? 0.5 * h : h;
    const double av = a.segment(j, u);
    if (av == 0.0) continue;
    for (int k = 1; k <= basis.K; ++k) {
      const double phase = -2.0 * M_PI * frequency_of(k) * u / T;
      block[k - 1] += w * av * root * unit_phase(phase);
    }
  }
  return block;
}

std::vector<Vec> project_all(const SegmentedFunction& a, const BasisIndex& basis,
                             int quad_nodes) {
  std::vector<Vec> blocks(a.segments());
  for (int j = 0; j < a.segments(); ++j)
    blocks[j] = project_segment(a, j, basis, quad_nodes);
  return blocks;
}

cplx reconstruct(const Vec& block, double u, const BasisIndex& basis) {
  basis.validate();
  if (block.size() != basis.K) throw param_error("coefficient block has wrong size");
  const double root = 1.0 / std::sqrt(basis.T);
  cplx s = 0;
  for (int k = 1; k <= basis.K; ++k)
    s += block[k - 1] * root * unit_phase(2.0 * M_PI * frequency_of(k) * u / basis.T);
  return s;
}

double reconstruct_real(const std::vector<Vec>& blocks, double t,
                        const BasisIndex& basis) {
  if (blocks.empty()) throw param_error("no coefficient blocks");
  const double span = basis.T * static_cast<double>(blocks.size());
  if (t < 0 || t >= span) return 0.0;
  int j = static_cast<int>(std::floor(t / basis.T));
  j = std::min<int>(j, static_cast<int>(blocks.size()) - 1);
  return reconstruct(blocks[j], t - j * basis.T, basis).real();
}

}  // namespace perint
