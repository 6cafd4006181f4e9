#pragma once

#include <memory>
#include <span>
#include <vector>

namespace qsol {

/// Surface area of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int N);

/// Volume of the ball of radius R in R^N.
double ball_volume(int N, double R);

/// Graded 1-D mesh r_0 = 0 < ... < r_M = R_max carrying the radial measure
/// sigma_{N-1} r^{N-1} dr.
///
/// Quadrature weights are the exact moments of the nodal hat functions
/// against the radial measure, so sum(weights) is the ball volume and any
/// field linear in r is integrated exactly. Element measures m_e are exact
/// integrals of the measure over each cell; the P1 stiffness coefficient of
/// cell e is m_e / h_e^2.
class RadialGrid {
 public:
  /// r_i = R_max (i/M)^grading. Requires M >= 64, grading > 0, R_max > 0.
  static std::shared_ptr<const RadialGrid> build(int N, double r_max, int M, double grading = 1.0);
  /// Grid on explicit nodes (starting at 0, strictly increasing).
  static std::shared_ptr<const RadialGrid> from_nodes(int N, std::vector<double> nodes,
                                                      double grading = 1.0);

  int dimension() const noexcept { return N_; }
  double r_max() const noexcept { return nodes_.back(); }
  double grading() const noexcept { return grading_; }
  /// Number of cells M; there are M + 1 nodes.
  int intervals() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> cell_measures() const noexcept { return cell_measures_; }
  std::span<const double> stiffness() const noexcept { return stiffness_; }

  /// Sum_i w_i f_i.
  double integrate(std::span<const double> values) const;
  /// Integral of |f'|^2 for the piecewise-linear interpolant.
  double dirichlet(std::span<const double> values) const;

 private:
  RadialGrid(int N, std::vector<double> nodes, double grading);

  int N_;
  double grading_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cell_measures_;
  std::vector<double> stiffness_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Nodal values of the dual variable v on a grid, with v(R_max) = 0.
class DiscreteField {
 public:
  /// Zero field.
  explicit DiscreteField(GridPtr grid);
  /// Throws ValidationError on size mismatch, non-finite values or a
  /// nonzero edge value.
  DiscreteField(GridPtr grid, std::vector<double> values);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// u = f(v) nodewise.
  std::vector<double> transformed() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace qsol
