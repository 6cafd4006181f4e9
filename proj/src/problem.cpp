#include "qsol/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "qsol/errors.hpp"

namespace qsol {

bool all_pass(const std::vector<DiagnosticReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const DiagnosticReport& r) { return r.pass; });
}

// ---------------------------------------------------------------- potential

Potential::Potential(double R1, double r1, double r2, double R2, double alpha,
                     std::function<double(double)> profile)
    : R1_(R1), r1_(r1), r2_(r2), R2_(R2), alpha_(alpha), profile_(std::move(profile)) {
  if (!(0.0 < R1 && R1 < r1 && r1 < r2 && r2 < R2)) {
    throw ValidationError(fmt::format(
        "potential radii must satisfy 0 < R1 < r1 < r2 < R2, got ({}, {}, {}, {})", R1, r1, r2,
        R2));
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError(fmt::format("potential alpha must be positive, got {}", alpha));
  }
  if (!profile_) throw ValidationError("potential profile is empty");
}

Potential build_tent_potential(double R1, double r1, double r2, double R2, double alpha) {
  auto profile = [=](double r) {
    if (r <= R1) return alpha;
    if (r < r1) return alpha * (r1 - r) / (r1 - R1);
    if (r <= r2) return 0.0;
    if (r < R2) return alpha * (r - r2) / (R2 - r2);
    return alpha;
  };
  return Potential(R1, r1, r2, R2, alpha, profile);
}

// ------------------------------------------------------------- nonlinearity

Nonlinearity power_nonlinearity(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw ValidationError(
        fmt::format("power nonlinearity needs p > 1 (g(t)/t -> 0 at 0 fails otherwise), got {}", p));
  }
  Nonlinearity g;
  g.kind = "power";
  g.exponent = p;
  g.g = [p](double t) { return std::pow(t, p); };
  g.dg = [p](double t) { return p * std::pow(t, p - 1.0); };
  g.G = [p](double t) { return std::pow(t, p + 1.0) / (p + 1.0); };
  g.theta = p + 1.0;
  g.closed_form_G = true;
  return g;
}

Nonlinearity custom_nonlinearity(std::function<double(double)> g, double theta,
                                 std::function<double(double)> G,
                                 std::function<double(double)> dg) {
  if (!g) throw ValidationError("custom nonlinearity: g is empty");
  Nonlinearity out;
  out.kind = "custom";
  out.theta = theta;
  out.closed_form_G = static_cast<bool>(G);
  out.G = std::move(G);
  if (!dg) {
    dg = [g](double t) {
      const double step = 1e-6 * (1.0 + std::fabs(t));
      if (t < step) return (g(t + step) - g(t)) / step;
      return (g(t + step) - g(t - step)) / (2.0 * step);
    };
  }
  out.g = std::move(g);
  out.dg = std::move(dg);
  return out;
}

double primitive(const Nonlinearity& g, double t) {
  if (t < 0.0) throw DomainError(fmt::format("primitive: negative argument {}", t));
  if (t == 0.0) return 0.0;
  if (g.closed_form_G) return g.G(t);
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g.g, 0.0, t, 20, 1e-12,
                                                                        &err);
}

// ---------------------------------------------------------- classification

const char* to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::subcritical: return "subcritical";
    case GrowthClass::critical: return "critical";
    case GrowthClass::supercritical: return "supercritical";
    case GrowthClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double critical_exponent(int N) {
  if (N < 2) throw ValidationError(fmt::format("dimension must be >= 2, got {}", N));
  if (N == 2) return std::numeric_limits<double>::quiet_NaN();
  return 4.0 * N / (N - 2.0);
}

GrowthReport classify_growth(const Nonlinearity& g, int N) {
  GrowthReport report;
  report.critical_exponent = critical_exponent(N);
  report.probe_t = {1e2, 1e3, 1e4};
  for (double t : report.probe_t) {
    const double lg = std::log(g.g(t));
    // g is compared against t^{22*-1}, i.e. G against t^{22*}; N = 2 uses
    // the exp(beta t^4) scale with beta = 1.
    const double scale = N == 2 ? std::pow(t, 4.0) : (report.critical_exponent - 1.0) * std::log(t);
    report.log_ratios.push_back(lg - scale);
  }

  constexpr double kFlatSlope = 0.05;
  std::vector<double> slopes;
  for (std::size_t i = 1; i < report.log_ratios.size(); ++i) {
    const double d = report.log_ratios[i] - report.log_ratios[i - 1];
    slopes.push_back(d / std::log(report.probe_t[i] / report.probe_t[i - 1]));
  }
  const bool finite = std::all_of(slopes.begin(), slopes.end(),
                                  [](double s) { return std::isfinite(s); });
  auto every = [&](auto pred) { return std::all_of(slopes.begin(), slopes.end(), pred); };
  if (!finite) {
    report.growth = GrowthClass::inconclusive;
  } else if (every([](double s) { return std::fabs(s) <= kFlatSlope; })) {
    report.growth = GrowthClass::critical;
  } else if (every([](double s) { return s < -kFlatSlope; })) {
    report.growth = GrowthClass::subcritical;
  } else if (every([](double s) { return s > kFlatSlope; })) {
    report.growth = GrowthClass::supercritical;
  } else {
    report.growth = GrowthClass::inconclusive;
  }
  return report;
}

// -------------------------------------------------------------- truncation

double minimum_truncation_constant(double theta) {
  return std::max(theta / (theta - 2.0), 2.0);
}

double ratio_level_root(const Nonlinearity& g, double level) {
  auto above = [&](double t) { return g.g(t) / t >= level; };
  double lo = 0.0;
  double hi = 0.0;
  for (int e = -12; e <= 12; ++e) {
    const double t = std::pow(10.0, e);
    if (above(t)) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi == 0.0) {
    throw NumericalError(fmt::format(
        "truncation level unreachable: g(t)/t stays below {} on (0, 1e12]", level));
  }
  if (lo == 0.0) {
    throw ValidationError(fmt::format(
        "truncation level {} has no positive root: g(t)/t already exceeds it at t = 1e-12",
        level));
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (above(mid) ? hi : lo) = mid;
  }
  return hi;
}

double solve_truncation_level(const Nonlinearity& g, double alpha, double k) {
  if (!(g.theta > 2.0)) {
    throw ValidationError(fmt::format("theta must exceed 2, got {}", g.theta));
  }
  const double kmin = minimum_truncation_constant(g.theta);
  if (!(k > kmin)) {
    throw ValidationError(fmt::format(
        "truncation constant k = {} must exceed max{{theta/(theta-2), 2}} = {}", k, kmin));
  }
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  return ratio_level_root(g, alpha / k);
}

TruncatedNonlinearity::TruncatedNonlinearity(Nonlinearity parent, Potential potential, double k)
    : parent_(std::move(parent)),
      potential_(std::move(potential)),
      k_(k),
      slope_(potential_.alpha() / k),
      a_(solve_truncation_level(parent_, potential_.alpha(), k)),
      G_a_(primitive(parent_, a_)) {}

double TruncatedNonlinearity::g_bar(double s) const { return w_region(false, s); }

double TruncatedNonlinearity::w_region(bool in_lambda, double s) const {
  if (!(s >= 0.0)) throw DomainError(fmt::format("w: argument must be >= 0, got {}", s));
  if (in_lambda || s <= a_) return parent_.g(s);
  return slope_ * s;
}

double TruncatedNonlinearity::W_region(bool in_lambda, double t) const {
  if (!(t >= 0.0)) throw DomainError(fmt::format("W: argument must be >= 0, got {}", t));
  if (in_lambda || t <= a_) return primitive(parent_, t);
  return G_a_ + 0.5 * slope_ * (t * t - a_ * a_);
}

double TruncatedNonlinearity::dw_region(bool in_lambda, double s) const {
  if (!(s >= 0.0)) throw DomainError(fmt::format("dw: argument must be >= 0, got {}", s));
  if (in_lambda || s <= a_) return parent_.dg(s);
  return slope_;
}

ProblemSpec::ProblemSpec(int N, Potential potential, Nonlinearity nonlinearity, double k)
    : N_(N), trunc_(std::move(nonlinearity), std::move(potential), k) {
  if (N < 2) throw ValidationError(fmt::format("dimension must be >= 2, got {}", N));
}

ProblemSpec canonical_problem(double p) {
  return ProblemSpec(3, build_tent_potential(1.0, 2.0, 3.0, 4.0, 1.0), power_nonlinearity(p), 4.0);
}

// -------------------------------------------------------------- validators

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return out;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

// Records a violation when `excess` > 0; keeps the largest one.
struct Tracker {
  DiagnosticReport report;
  explicit Tracker(std::string name, double tol) {
    report.name = std::move(name);
    report.tolerance = tol;
  }
  void observe(bool ok, double location, double value, const std::string& what) {
    if (ok) return;
    if (report.pass || std::fabs(value) > std::fabs(report.worst_value)) {
      report.worst_location = location;
      report.worst_value = value;
      report.worst_sample = what;
    }
    report.pass = false;
  }
};

}  // namespace

std::vector<DiagnosticReport> verify_hypotheses(const Potential& V, const Nonlinearity& g, double k,
                                                const HypothesisSamples& s) {
  std::vector<DiagnosticReport> out;
  const double rtol = s.relative_tolerance;

  {
    Tracker a1("A1", 0.0);
    for (double r : lin_grid(V.r1(), V.r2(), s.r_points)) {
      const double v = V(r);
      a1.observe(v == 0.0, r, v, fmt::format("V({}) = {} != 0 on Omega", r, v));
    }
    out.push_back(a1.report);
  }
  {
    Tracker a2("A2", rtol);
    auto check = [&](double r) {
      const double v = V(r);
      a2.observe(v >= V.alpha() * (1.0 - rtol), r, V.alpha() - v,
                 fmt::format("V({}) = {} < alpha = {} off Lambda", r, v, V.alpha()));
    };
    for (double r : lin_grid(0.0, V.R1(), s.r_points)) check(r);
    for (double r : lin_grid(V.R2(), std::max(s.r_max, V.R2() * 1.0001), s.r_points)) check(r);
    out.push_back(a2.report);
  }
  {
    Tracker nonneg("V_nonnegative", 0.0);
    for (double r : lin_grid(0.0, s.r_max, 4 * s.r_points)) {
      const double v = V(r);
      nonneg.observe(std::isfinite(v) && v >= 0.0, r, v, fmt::format("V({}) = {}", r, v));
    }
    out.push_back(nonneg.report);
  }

  {
    // g(t)/t nondecreasing over decades and still growing at the far end.
    Tracker h1("H1", 10.0);
    std::vector<double> ratios;
    for (int e = 0; e <= 6; ++e) {
      const double t = std::pow(10.0, e);
      ratios.push_back(g.g(t) / t);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i) {
      h1.observe(ratios[i] >= ratios[i - 1], std::pow(10.0, i), ratios[i],
                 fmt::format("g(t)/t decreased between 1e{} and 1e{}", i - 1, i));
    }
    h1.observe(ratios[6] >= 10.0 * ratios[3], 1e6, ratios[6] / ratios[3],
               "g(t)/t grows by less than 10x from t = 1e3 to 1e6");
    out.push_back(h1.report);
  }

  const auto ts = log_grid(s.t_min, s.t_max, s.t_points);
  {
    Tracker h2("H2", rtol);
    if (!(g.theta > 2.0)) {
      h2.observe(false, 0.0, g.theta, fmt::format("theta = {} is not > 2", g.theta));
    }
    for (double t : ts) {
      const double thG = g.theta * primitive(g, t);
      const double tg = t * g.g(t);
      const bool ok = thG >= 0.0 && thG <= tg * (1.0 + rtol) + 1e-300;
      h2.observe(ok, t, thG - tg, fmt::format("theta G({0}) = {1} vs t g(t) = {2}", t, thG, tg));
    }
    out.push_back(h2.report);
  }
  {
    Tracker h3("H3", rtol);
    double prev = g.g(ts.front()) / ts.front();
    for (std::size_t i = 1; i < ts.size(); ++i) {
      const double cur = g.g(ts[i]) / ts[i];
      h3.observe(cur >= prev * (1.0 - rtol), ts[i], prev - cur,
                 fmt::format("g(t)/t decreases near t = {}", ts[i]));
      prev = cur;
    }
    out.push_back(h3.report);
  }
  {
    Tracker h4("H4", s.h4_tolerance);
    const double ratio = g.g(s.h4_probe) / s.h4_probe;
    h4.observe(ratio <= s.h4_tolerance, s.h4_probe, ratio,
               fmt::format("g(t)/t = {} at t = {} (does not vanish at 0)", ratio, s.h4_probe));
    out.push_back(h4.report);
  }

  const double kmin = minimum_truncation_constant(g.theta);
  {
    Tracker kb("k_bound", kmin);
    kb.observe(k > kmin && g.theta > 2.0, k, k - kmin,
               fmt::format("k = {} must exceed max{{theta/(theta-2), 2}} = {}", k, kmin));
    out.push_back(kb.report);
  }

  Tracker g1("G1", rtol);
  Tracker g2("G2", rtol);
  try {
    const TruncatedNonlinearity tr(g, V, k);
    std::vector<double> tt = ts;
    tt.push_back(tr.a());
    for (double f : {0.5, 0.999, 1.001, 2.0, 10.0}) tt.push_back(f * tr.a());
    std::sort(tt.begin(), tt.end());

    for (double r : lin_grid(0.0, s.r_max, s.r_points)) {
      const bool inside = V.in_lambda(r);
      for (double t : tt) {
        const double W = tr.W_region(inside, t);
        const double wt = tr.w_region(inside, t) * t;
        if (inside) {
          const double thW = g.theta * W;
          g1.observe(thW >= 0.0 && thW <= wt * (1.0 + rtol) + 1e-300, r, thW - wt,
                     fmt::format("theta W = {} > w t = {} at (r, t) = ({}, {})", thW, wt, r, t));
        } else {
          const double bound = V(r) * t * t / k;
          const bool ok = W >= 0.0 && 2.0 * W <= wt * (1.0 + rtol) + 1e-300 &&
                          wt <= bound * (1.0 + rtol) + 1e-300;
          g2.observe(ok, r, std::max(2.0 * W - wt, wt - bound),
                     fmt::format("2W = {}, w t = {}, V t^2/k = {} at (r, t) = ({}, {})", 2.0 * W,
                                 wt, bound, r, t));
        }
      }
    }
  } catch (const std::exception& e) {
    const std::string why = fmt::format("truncation unavailable: {}", e.what());
    g1.observe(false, 0.0, 0.0, why);
    g2.observe(false, 0.0, 0.0, why);
  }
  out.push_back(g1.report);
  out.push_back(g2.report);
  return out;
}

std::vector<DiagnosticReport> verify_hypotheses(const ProblemSpec& spec,
                                                const HypothesisSamples& samples) {
  return verify_hypotheses(spec.potential(), spec.nonlinearity(), spec.k(), samples);
}

}  // namespace qsol
