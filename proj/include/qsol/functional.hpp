#pragma once

#include <span>
#include <vector>

#include "qsol/grid.hpp"
#include "qsol/problem.hpp"

namespace qsol {

enum class FunctionalKind {
  truncated,  // H_eps: nonlinearity w(x, s), primitive W
  original,   // J_eps: nonlinearity g(s), primitive G
};

/// Tridiagonal matrix on the free nodes 0..M-1 (the edge node is fixed).
struct Tridiagonal {
  std::vector<double> lower;  // size n-1
  std::vector<double> diag;   // size n
  std::vector<double> upper;  // size n-1
};

struct EnergyParts {
  double gradient = 0.0;   // int |v'|^2 (without eps^2/2)
  double potential = 0.0;  // int V f(v)^2
  double nonlinear = 0.0;  // int W(x, f(v)) or int G(f(v))

  double total(double eps) const { return 0.5 * eps * eps * gradient + 0.5 * potential - nonlinear; }
};

/// Discrete form of
///   E(v) = eps^2/2 int |v'|^2 + 1/2 int V f(v)^2 - int N(x, f(v))
/// with P1 stiffness on cells and lumped nodal quadrature for the
/// potential and nonlinear terms. gradient() is the exact derivative of
/// energy() with respect to the nodal values, i.e. the weak-form residual
/// tested against nodal hat functions.
class DiscreteFunctional {
 public:
  DiscreteFunctional(const ProblemSpec& spec, GridPtr grid, double eps,
                     FunctionalKind kind = FunctionalKind::truncated);

  double eps() const noexcept { return eps_; }
  const RadialGrid& grid() const noexcept { return *grid_; }
  const ProblemSpec& spec() const noexcept { return *spec_; }
  FunctionalKind kind() const noexcept { return kind_; }
  std::span<const double> potential_values() const noexcept { return V_; }
  /// Nodes in the open annulus Lambda.
  const std::vector<char>& in_lambda() const noexcept { return in_lambda_; }

  double energy(std::span<const double> v) const;
  EnergyParts energy_parts(std::span<const double> v) const;
  /// Component M (the fixed edge node) is always zero.
  std::vector<double> gradient(std::span<const double> v) const;
  void gradient(std::span<const double> v, std::span<double> out) const;
  /// Second derivative on the free nodes.
  Tridiagonal hessian(std::span<const double> v) const;

  /// Nonlinearity value w(x_i, s) (or g(s)) at node i.
  double source(std::size_t i, double s) const;
  double source_derivative(std::size_t i, double s) const;
  double primitive_at(std::size_t i, double t) const;

 private:
  const ProblemSpec* spec_;
  GridPtr grid_;
  double eps_;
  FunctionalKind kind_;
  std::vector<double> V_;
  std::vector<char> in_lambda_;
};

/// sqrt(sum_i R_i^2 / w_i) over free nodes: the L^2 norm of the lumped
/// Riesz representative of a weak-form residual.
double residual_norm(const RadialGrid& grid, std::span<const double> residual);

double energy_H(const DiscreteField& v, double eps, const ProblemSpec& spec);
double energy_J(const DiscreteField& v, double eps, const ProblemSpec& spec);
std::vector<double> gradient_H(const DiscreteField& v, double eps, const ProblemSpec& spec);
std::vector<double> gradient_J(const DiscreteField& v, double eps, const ProblemSpec& spec);

/// ||u||_X = (int |u'|^2 + int V u^2)^{1/2}.
double x_norm(const RadialGrid& grid, std::span<const double> u, const Potential& V);
/// ||u||_{H^1} = (int |u'|^2 + int u^2)^{1/2}.
double h1_norm(const RadialGrid& grid, std::span<const double> u);
double x_norm(const DiscreteField& u, const Potential& V);
double h1_norm(const DiscreteField& u);

/// Orlicz-Sobolev norm |v'|_{L^2} + |v|_{E_L}.
double h1L_norm(const DiscreteField& v, const Potential& V);

/// Pointwise |u(r)| <= 2 pi r^{-1/2} ||u||_X at every node with r > 0.
/// worst_value is the largest ratio |u(r)| r^{1/2} / (2 pi ||u||_X).
DiagnosticReport straus_check(const RadialGrid& grid, std::span<const double> u,
                              const Potential& V);
DiagnosticReport straus_check(const DiscreteField& u, const Potential& V);

}  // namespace qsol
