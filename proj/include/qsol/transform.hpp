#pragma once

// Change of variables v = h(u), dv = sqrt(1 + u^2) du, and the derived
// Young function L(v) = f(v)^2 where f = h^{-1}.

namespace qsol {

class TransformCalculus {
 public:
  TransformCalculus() = default;
  TransformCalculus(double newton_tol, int max_newton_iters);

  double newton_tol() const noexcept { return newton_tol_; }
  int max_newton_iters() const noexcept { return max_newton_iters_; }

  /// h(u) = u sqrt(1+u^2)/2 + asinh(u)/2. Odd, strictly increasing.
  double h(double u) const;
  /// h'(u) = sqrt(1+u^2).
  double h_prime(double u) const;

  /// Inverse of h by Newton iteration seeded from the small/large-|v|
  /// asymptotics. Guarantees |h(f(v)) - v| <= newton_tol * (1 + |v|).
  double f(double v) const;
  double f_prime(double v) const;

  double L(double v) const;
  double L_prime(double v) const;
  double L_second(double v) const;

  // Same quantities given u = f(v) already computed; avoids repeated Newton
  // solves in inner loops.
  static double f_prime_from_u(double u);
  static double L_prime_from_u(double u);
  static double L_second_from_u(double u);

 private:
  double newton_tol_ = 1e-14;
  int max_newton_iters_ = 60;
};

/// Shared default-configured instance.
const TransformCalculus& default_transform();

}  // namespace qsol
