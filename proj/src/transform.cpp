#include "qsol/transform.hpp"

#include <cmath>
#include <fmt/format.h>

#include "qsol/errors.hpp"

namespace qsol {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(fmt::format("{}: non-finite argument {}", what, x));
  }
}

}  // namespace

TransformCalculus::TransformCalculus(double newton_tol, int max_newton_iters)
    : newton_tol_(newton_tol), max_newton_iters_(max_newton_iters) {
  if (!(newton_tol > 0.0) || max_newton_iters < 1) {
    throw ValidationError("TransformCalculus: newton_tol must be > 0 and max_newton_iters >= 1");
  }
}

double TransformCalculus::h(double u) const {
  require_finite(u, "h");
  // asinh keeps the logarithmic part accurate for u < 0 and near 0.
  return 0.5 * u * std::sqrt(1.0 + u * u) + 0.5 * std::asinh(u);
}

double TransformCalculus::h_prime(double u) const {
  require_finite(u, "h_prime");
  return std::sqrt(1.0 + u * u);
}

double TransformCalculus::f(double v) const {
  require_finite(v, "f");
  if (v == 0.0) return 0.0;
  const double a = std::fabs(v);
  const double tol = newton_tol_ * (1.0 + a);

  // h is convex on u > 0, so Newton from either seed converges monotonically
  // after at most one overshoot.
  double u = a < 1.0 ? a : std::sqrt(2.0 * a);
  for (int it = 0; it < max_newton_iters_; ++it) {
    const double s = std::sqrt(1.0 + u * u);
    const double res = 0.5 * u * s + 0.5 * std::asinh(u) - a;
    if (std::fabs(res) <= tol) return std::copysign(u, v);
    const double next = u - res / s;
    if (next == u) break;
    u = next > 0.0 ? next : 0.5 * u;
  }
  const double res = h(u) - a;
  if (std::fabs(res) <= tol) return std::copysign(u, v);
  throw NumericalError(
      fmt::format("f: Newton did not converge for v = {} (residual {})", v, res));
}

double TransformCalculus::f_prime(double v) const { return f_prime_from_u(f(v)); }

double TransformCalculus::L(double v) const {
  const double u = f(v);
  return u * u;
}

double TransformCalculus::L_prime(double v) const { return L_prime_from_u(f(v)); }

double TransformCalculus::L_second(double v) const { return L_second_from_u(f(v)); }

double TransformCalculus::f_prime_from_u(double u) { return 1.0 / std::sqrt(1.0 + u * u); }

double TransformCalculus::L_prime_from_u(double u) { return 2.0 * u / std::sqrt(1.0 + u * u); }

double TransformCalculus::L_second_from_u(double u) {
  const double s = 1.0 + u * u;
  return 2.0 / (s * s);
}

const TransformCalculus& default_transform() {
  static const TransformCalculus instance;
  return instance;
}

}  // namespace qsol
