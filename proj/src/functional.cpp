#include "qsol/functional.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qsol/errors.hpp"
#include "qsol/orlicz.hpp"
#include "qsol/transform.hpp"

namespace qsol {

namespace {

void require_size(const RadialGrid& grid, std::span<const double> v, const char* what) {
  if (v.size() != grid.size()) {
    throw ValidationError(fmt::format("{}: {} values on {} nodes", what, v.size(), grid.size()));
  }
}

void require_finite(double x, std::size_t node, const char* what) {
  if (!std::isfinite(x)) {
    throw NumericalError(fmt::format("{}: non-finite value at node {}", what, node));
  }
}

}  // namespace

DiscreteFunctional::DiscreteFunctional(const ProblemSpec& spec, GridPtr grid, double eps,
                                       FunctionalKind kind)
    : spec_(&spec), grid_(std::move(grid)), eps_(eps), kind_(kind) {
  if (!grid_) throw ValidationError("DiscreteFunctional: null grid");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError(fmt::format("epsilon must be positive, got {}", eps));
  }
  if (grid_->dimension() != spec.dimension()) {
    throw ValidationError(fmt::format("grid dimension {} does not match problem dimension {}",
                                      grid_->dimension(), spec.dimension()));
  }
  const auto r = grid_->nodes();
  V_.resize(r.size());
  in_lambda_.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    V_[i] = spec.potential()(r[i]);
    in_lambda_[i] = spec.potential().in_lambda(r[i]) ? 1 : 0;
  }
}

double DiscreteFunctional::source(std::size_t i, double s) const {
  if (kind_ == FunctionalKind::original) {
    if (!(s >= 0.0)) throw DomainError(fmt::format("g: argument must be >= 0, got {}", s));
    return spec_->nonlinearity().g(s);
  }
  return spec_->truncation().w_region(in_lambda_[i] != 0, s);
}

double DiscreteFunctional::source_derivative(std::size_t i, double s) const {
  if (kind_ == FunctionalKind::original) {
    if (!(s >= 0.0)) throw DomainError(fmt::format("g': argument must be >= 0, got {}", s));
    return spec_->nonlinearity().dg(s);
  }
  return spec_->truncation().dw_region(in_lambda_[i] != 0, s);
}

double DiscreteFunctional::primitive_at(std::size_t i, double t) const {
  if (kind_ == FunctionalKind::original) return primitive(spec_->nonlinearity(), t);
  return spec_->truncation().W_region(in_lambda_[i] != 0, t);
}

EnergyParts DiscreteFunctional::energy_parts(std::span<const double> v) const {
  require_size(*grid_, v, "energy");
  const auto& tc = default_transform();
  const auto w = grid_->weights();
  EnergyParts parts;
  parts.gradient = grid_->dirichlet(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = tc.f(v[i]);
    const double pot = w[i] * V_[i] * u * u;
    const double nl = w[i] * primitive_at(i, u);
    require_finite(pot, i, "energy");
    require_finite(nl, i, "energy");
    parts.potential += pot;
    parts.nonlinear += nl;
  }
  require_finite(parts.gradient, 0, "energy gradient term");
  return parts;
}

double DiscreteFunctional::energy(std::span<const double> v) const {
  return energy_parts(v).total(eps_);
}

void DiscreteFunctional::gradient(std::span<const double> v, std::span<double> out) const {
  require_size(*grid_, v, "gradient");
  require_size(*grid_, out, "gradient output");
  const auto& tc = default_transform();
  const auto w = grid_->weights();
  const auto c = grid_->stiffness();
  const double e2 = eps_ * eps_;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double stiff = 0.0;
    if (i > 0) stiff += c[i - 1] * (v[i] - v[i - 1]);
    stiff += c[i] * (v[i] - v[i + 1]);
    const double u = tc.f(v[i]);
    const double fp = TransformCalculus::f_prime_from_u(u);
    out[i] = e2 * stiff + w[i] * (V_[i] * u - source(i, u)) * fp;
    require_finite(out[i], i, "gradient");
  }
  out[n - 1] = 0.0;
}

std::vector<double> DiscreteFunctional::gradient(std::span<const double> v) const {
  std::vector<double> out(v.size());
  gradient(v, out);
  return out;
}

Tridiagonal DiscreteFunctional::hessian(std::span<const double> v) const {
  require_size(*grid_, v, "hessian");
  const auto& tc = default_transform();
  const auto w = grid_->weights();
  const auto c = grid_->stiffness();
  const double e2 = eps_ * eps_;
  const std::size_t n = v.size() - 1;
  Tridiagonal t;
  t.diag.resize(n);
  t.lower.resize(n - 1);
  t.upper.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = tc.f(v[i]);
    const double fp = TransformCalculus::f_prime_from_u(u);
    const double fp2 = fp * fp;
    const double fp4 = fp2 * fp2;
    // d/dv [f f'] = f'^4 and d/dv [N(f) f'] = N'(f) f'^2 - N(f) f f'^4.
    const double local = V_[i] * fp4 - (source_derivative(i, u) * fp2 - source(i, u) * u * fp4);
    double d = w[i] * local + e2 * c[i];
    if (i > 0) d += e2 * c[i - 1];
    t.diag[i] = d;
    require_finite(d, i, "hessian");
    if (i + 1 < n) {
      t.upper[i] = -e2 * c[i];
      t.lower[i] = -e2 * c[i];
    }
  }
  return t;
}

double residual_norm(const RadialGrid& grid, std::span<const double> residual) {
  require_size(grid, residual, "residual_norm");
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < residual.size(); ++i) sum += residual[i] * residual[i] / w[i];
  return std::sqrt(sum);
}

double energy_H(const DiscreteField& v, double eps, const ProblemSpec& spec) {
  return DiscreteFunctional(spec, v.grid_ptr(), eps, FunctionalKind::truncated).energy(v.values());
}

double energy_J(const DiscreteField& v, double eps, const ProblemSpec& spec) {
  return DiscreteFunctional(spec, v.grid_ptr(), eps, FunctionalKind::original).energy(v.values());
}

std::vector<double> gradient_H(const DiscreteField& v, double eps, const ProblemSpec& spec) {
  return DiscreteFunctional(spec, v.grid_ptr(), eps, FunctionalKind::truncated).gradient(v.values());
}

std::vector<double> gradient_J(const DiscreteField& v, double eps, const ProblemSpec& spec) {
  return DiscreteFunctional(spec, v.grid_ptr(), eps, FunctionalKind::original).gradient(v.values());
}

double x_norm(const RadialGrid& grid, std::span<const double> u, const Potential& V) {
  require_size(grid, u, "x_norm");
  const auto r = grid.nodes();
  const auto w = grid.weights();
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) pot += w[i] * V(r[i]) * u[i] * u[i];
  return std::sqrt(grid.dirichlet(u) + pot);
}

double h1_norm(const RadialGrid& grid, std::span<const double> u) {
  require_size(grid, u, "h1_norm");
  const auto w = grid.weights();
  double mass = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mass += w[i] * u[i] * u[i];
  return std::sqrt(grid.dirichlet(u) + mass);
}

double x_norm(const DiscreteField& u, const Potential& V) { return x_norm(u.grid(), u.values(), V); }

double h1_norm(const DiscreteField& u) { return h1_norm(u.grid(), u.values()); }

double h1L_norm(const DiscreteField& v, const Potential& V) {
  return std::sqrt(v.grid().dirichlet(v.values())) + orlicz_norm(v, V).value;
}

DiagnosticReport straus_check(const RadialGrid& grid, std::span<const double> u,
                              const Potential& V) {
  DiagnosticReport rep;
  rep.name = "straus_bound";
  rep.tolerance = 1.0;
  const double xn = x_norm(grid, u, V);
  const auto r = grid.nodes();
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double bound = 2.0 * std::numbers::pi * xn / std::sqrt(r[i]);
    const double mag = std::fabs(u[i]);
    const double ratio = bound > 0.0 ? mag / bound : (mag > 0.0 ? INFINITY : 0.0);
    if (ratio > rep.worst_value || i == 1) {
      rep.worst_value = ratio;
      rep.worst_location = r[i];
    }
  }
  rep.pass = rep.worst_value <= 1.0;
  rep.worst_sample = fmt::format("|u(r)| / (2 pi r^-1/2 ||u||_X) = {} at r = {}", rep.worst_value,
                                 rep.worst_location);
  return rep;
}

DiagnosticReport straus_check(const DiscreteField& u, const Potential& V) {
  return straus_check(u.grid(), u.values(), V);
}

}  // namespace qsol
