#include "qsol/grid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qsol/errors.hpp"
#include "qsol/transform.hpp"

namespace qsol {

double unit_sphere_area(int N) {
  if (N < 1) throw ValidationError(fmt::format("dimension must be >= 1, got {}", N));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double ball_volume(int N, double R) { return unit_sphere_area(N) * std::pow(R, N) / N; }

namespace {

// Integrals over one cell [a, a+h] of s^j (a + h s)^{N-1} h ds for the
// measure r^{N-1} dr, written as positive binomial sums so nothing cancels.
struct CellMoments {
  double total;  // int r^{N-1} dr
  double left;   // int (1 - s) r^{N-1} dr
  double right;  // int s r^{N-1} dr
};

CellMoments cell_moments(int N, double a, double h) {
  CellMoments m{0.0, 0.0, 0.0};
  double binom = 1.0;
  for (int j = 0; j <= N - 1; ++j) {
    const double term = binom * std::pow(a, N - 1 - j) * std::pow(h, j) * h;
    m.total += term / (j + 1);
    m.right += term / (j + 2);
    m.left += term / ((j + 1.0) * (j + 2.0));
    binom = binom * (N - 1 - j) / (j + 1);
  }
  return m;
}

}  // namespace

RadialGrid::RadialGrid(int N, std::vector<double> nodes, double grading)
    : N_(N), grading_(grading), nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  const double sigma = unit_sphere_area(N_);
  weights_.assign(n, 0.0);
  cell_measures_.resize(n - 1);
  stiffness_.resize(n - 1);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double a = nodes_[e];
    const double h = nodes_[e + 1] - a;
    const CellMoments m = cell_moments(N_, a, h);
    cell_measures_[e] = sigma * m.total;
    stiffness_[e] = cell_measures_[e] / (h * h);
    weights_[e] += sigma * m.left;
    weights_[e + 1] += sigma * m.right;
  }
}

std::shared_ptr<const RadialGrid> RadialGrid::build(int N, double r_max, int M, double grading) {
  if (N < 2) throw ValidationError(fmt::format("grid dimension must be >= 2, got {}", N));
  if (M < 64) throw ValidationError(fmt::format("grid needs M >= 64 cells, got {}", M));
  if (!(grading > 0.0) || !std::isfinite(grading)) {
    throw ValidationError(fmt::format("grid grading must be > 0, got {}", grading));
  }
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ValidationError(fmt::format("grid R_max must be > 0, got {}", r_max));
  }
  std::vector<double> nodes(M + 1);
  for (int i = 0; i <= M; ++i) {
    nodes[i] = r_max * std::pow(static_cast<double>(i) / M, grading);
  }
  nodes[M] = r_max;
  return std::shared_ptr<const RadialGrid>(new RadialGrid(N, std::move(nodes), grading));
}

std::shared_ptr<const RadialGrid> RadialGrid::from_nodes(int N, std::vector<double> nodes,
                                                         double grading) {
  if (N < 2) throw ValidationError(fmt::format("grid dimension must be >= 2, got {}", N));
  if (nodes.size() < 65) {
    throw ValidationError(fmt::format("grid needs at least 65 nodes, got {}", nodes.size()));
  }
  if (nodes.front() != 0.0) throw ValidationError("grid must start at r = 0");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i])) {
      throw ValidationError(fmt::format("grid nodes must increase strictly (index {})", i));
    }
  }
  return std::shared_ptr<const RadialGrid>(new RadialGrid(N, std::move(nodes), grading));
}

double RadialGrid::integrate(std::span<const double> values) const {
  if (values.size() != nodes_.size()) {
    throw ValidationError(fmt::format("integrate: {} values on {} nodes", values.size(), nodes_.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += weights_[i] * values[i];
  return sum;
}

double RadialGrid::dirichlet(std::span<const double> values) const {
  if (values.size() != nodes_.size()) {
    throw ValidationError(fmt::format("dirichlet: {} values on {} nodes", values.size(), nodes_.size()));
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < stiffness_.size(); ++e) {
    const double d = values[e + 1] - values[e];
    sum += stiffness_[e] * d * d;
  }
  return sum;
}

DiscreteField::DiscreteField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw ValidationError("DiscreteField: null grid");
  values_.assign(grid_->size(), 0.0);
}

DiscreteField::DiscreteField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ValidationError("DiscreteField: null grid");
  if (values_.size() != grid_->size()) {
    throw ValidationError(
        fmt::format("DiscreteField: {} values on {} nodes", values_.size(), grid_->size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError(fmt::format("DiscreteField: non-finite value at node {}", i));
    }
  }
  if (values_.back() != 0.0) {
    throw ValidationError(
        fmt::format("DiscreteField: edge value must be 0, got {}", values_.back()));
  }
}

std::vector<double> DiscreteField::transformed() const {
  const auto& tc = default_transform();
  std::vector<double> u(values_.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = tc.f(values_[i]);
  return u;
}

}  // namespace qsol
