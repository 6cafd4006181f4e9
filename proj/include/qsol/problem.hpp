#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qsol/diagnostic.hpp"

namespace qsol {

/// Radial potential V(|x|) >= 0 vanishing on Omega = {r1 < r < r2} and
/// bounded below by alpha outside Lambda = {R1 < r < R2}.
class Potential {
 public:
  Potential(double R1, double r1, double r2, double R2, double alpha,
            std::function<double(double)> profile);

  double operator()(double r) const { return profile_(r); }

  double R1() const noexcept { return R1_; }
  double r1() const noexcept { return r1_; }
  double r2() const noexcept { return r2_; }
  double R2() const noexcept { return R2_; }
  double alpha() const noexcept { return alpha_; }

  bool in_omega(double r) const noexcept { return r > r1_ && r < r2_; }
  /// Open annulus Lambda.
  bool in_lambda(double r) const noexcept { return r > R1_ && r < R2_; }
  bool in_lambda_closure(double r) const noexcept { return r >= R1_ && r <= R2_; }

 private:
  double R1_, r1_, r2_, R2_, alpha_;
  std::function<double(double)> profile_;
};

/// Piecewise-linear potential: alpha on [0,R1], ramps to 0 at r1, zero on
/// [r1,r2], ramps back to alpha at R2, alpha beyond.
Potential build_tent_potential(double R1, double r1, double r2, double R2, double alpha);

/// Nonlinearity g on [0, inf) with antiderivative G, G(0) = 0.
struct Nonlinearity {
  std::string kind;  // "power" or "custom"
  double exponent = 0.0;  // p for the power family, unused otherwise
  std::function<double(double)> g;
  std::function<double(double)> dg;  // g'
  std::function<double(double)> G;   // may be empty when !closed_form_G
  double theta = 0.0;                // Ambrosetti-Rabinowitz exponent
  bool closed_form_G = true;
};

/// g(t) = t^p, G(t) = t^{p+1}/(p+1), theta = p + 1.
Nonlinearity power_nonlinearity(double p);

/// Generic nonlinearity. When `G` is empty the antiderivative is evaluated by
/// adaptive quadrature. When `dg` is empty a centered difference is used.
Nonlinearity custom_nonlinearity(std::function<double(double)> g, double theta,
                                 std::function<double(double)> G = {},
                                 std::function<double(double)> dg = {});

/// Antiderivative of g from 0 to t, closed form when available.
double primitive(const Nonlinearity& g, double t);

enum class GrowthClass { subcritical, critical, supercritical, inconclusive };

const char* to_string(GrowthClass c);

struct GrowthReport {
  GrowthClass growth = GrowthClass::inconclusive;
  /// 22* = 4N/(N-2) for N >= 3; NaN for N = 2.
  double critical_exponent = 0.0;
  /// log of g(t)/t^{22*-1} (resp. g(t)/exp(t^4)) at the probe points.
  std::vector<double> probe_t;
  std::vector<double> log_ratios;
};

/// 4N/(N-2), the exponent at which g(t) = t^{p}, p + 1 = 22*, is critical.
double critical_exponent(int N);

GrowthReport classify_growth(const Nonlinearity& g, int N);

/// Leftmost t > 0 with g(t)/t = level for nondecreasing g(t)/t, by
/// bracketing over decades and bisection to relative 1e-12. No check on k.
double ratio_level_root(const Nonlinearity& g, double level);

/// Smallest a > 0 with g(a)/a = alpha/k, after validating k.
double solve_truncation_level(const Nonlinearity& g, double alpha, double k);

/// k must exceed max{theta/(theta-2), 2}.
double minimum_truncation_constant(double theta);

/// Del Pino-Felmer truncation of g outside Lambda:
///   gbar(s) = g(s) for s <= a, (alpha/k) s for s > a,
///   w(x,s)  = chi_Lambda g(s) + (1 - chi_Lambda) gbar(s).
class TruncatedNonlinearity {
 public:
  TruncatedNonlinearity(Nonlinearity parent, Potential potential, double k);

  double a() const noexcept { return a_; }
  double k() const noexcept { return k_; }
  double slope() const noexcept { return slope_; }  // alpha / k
  const Nonlinearity& parent() const noexcept { return parent_; }
  const Potential& potential() const noexcept { return potential_; }

  double g_bar(double s) const;

  double w(double r, double s) const { return w_region(potential_.in_lambda(r), s); }
  double W(double r, double t) const { return W_region(potential_.in_lambda(r), t); }
  double w_region(bool in_lambda, double s) const;
  double W_region(bool in_lambda, double t) const;
  /// d/ds w(x, s); one-sided (left) value at s = a off Lambda.
  double dw_region(bool in_lambda, double s) const;

 private:
  Nonlinearity parent_;
  Potential potential_;
  double k_;
  double slope_;
  double a_;
  double G_a_;
};

/// Full problem instance: dimension, potential, nonlinearity, truncation.
class ProblemSpec {
 public:
  /// Validates N >= 2, k > max{theta/(theta-2), 2} and builds the truncation.
  ProblemSpec(int N, Potential potential, Nonlinearity nonlinearity, double k);

  int dimension() const noexcept { return N_; }
  const Potential& potential() const noexcept { return trunc_.potential(); }
  const Nonlinearity& nonlinearity() const noexcept { return trunc_.parent(); }
  const TruncatedNonlinearity& truncation() const noexcept { return trunc_; }
  double k() const noexcept { return trunc_.k(); }
  double theta() const noexcept { return trunc_.parent().theta; }
  double a() const noexcept { return trunc_.a(); }

 private:
  int N_;
  TruncatedNonlinearity trunc_;
};

/// Canonical instance: N = 3, tent (1,2,3,4), alpha = 1, g = t^p, k = 4.
ProblemSpec canonical_problem(double p = 13.0);

struct HypothesisSamples {
  int t_points = 400;
  double t_min = 1e-4;
  double t_max = 1e3;
  int r_points = 400;
  double r_max = 16.0;
  double h4_probe = 1e-6;
  double h4_tolerance = 1e-3;
  double relative_tolerance = 1e-10;
};

/// Samples A1-A2, H1-H4, the bound on k and (when k is admissible) G1-G2.
std::vector<DiagnosticReport> verify_hypotheses(const Potential& V, const Nonlinearity& g,
                                                double k, const HypothesisSamples& samples = {});
std::vector<DiagnosticReport> verify_hypotheses(const ProblemSpec& spec,
                                                const HypothesisSamples& samples = {});

}  // namespace qsol
