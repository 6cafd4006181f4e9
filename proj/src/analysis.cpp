#include "qsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "qsol/errors.hpp"
#include "qsol/functional.hpp"
#include "qsol/mountain_pass.hpp"
#include "qsol/transform.hpp"

namespace qsol {

namespace {

// Field-based checks need v to be a valid DiscreteField; a broken profile
// yields a failing report instead of an exception.
std::optional<DiscreteField> as_field(const Profile& p, std::string& why) {
  try {
    return DiscreteField(p.grid, p.v);
  } catch (const ValidationError& e) {
    why = e.what();
    return std::nullopt;
  }
}

DiagnosticReport invalid(std::string name, std::string why, double tol) {
  DiagnosticReport rep;
  rep.name = std::move(name);
  rep.pass = false;
  rep.worst_sample = "invalid profile: " + why;
  rep.worst_value = NAN;
  rep.tolerance = tol;
  return rep;
}

}  // namespace

Profile make_profile(const DiscreteField& v, const Potential& V) {
  Profile p;
  p.grid = v.grid_ptr();
  p.v.assign(v.values().begin(), v.values().end());
  p.u = v.transformed();
  const auto r = p.grid->nodes();
  p.V.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) p.V[i] = V(r[i]);
  return p;
}

double tail_radius(const Potential& V, double r_max) { return std::min(4.0 * V.R2(), 0.5 * r_max); }

DiagnosticReport check_geometry(const ProblemSpec& spec, double eps, const GridPtr& grid,
                                const DiagnosticTolerances& tol, std::uint64_t seed) {
  DiagnosticReport rep;
  rep.name = "mountain_pass_geometry";
  MountainPassConfig cfg;
  cfg.seed = seed;
  double endpoint_energy = NAN;
  try {
    const Endpoint e = make_endpoint(spec, eps, grid, cfg);
    endpoint_energy = energy_H(e.field, eps, spec);
  } catch (const NumericalError& e) {
    rep.pass = false;
    rep.worst_sample = fmt::format("no endpoint: {}", e.what());
    rep.worst_value = NAN;
    return rep;
  }
  const SphereProbe probe = sphere_probe(spec, eps, grid, tol.probe_radius, tol.probes, seed);
  const double bound = tol.geometry_slack * probe.lower_bound;
  rep.tolerance = bound;
  rep.worst_location = tol.probe_radius;
  rep.worst_value = probe.min_energy;
  rep.pass = endpoint_energy <= 0.0 && probe.min_energy > 0.0 && probe.min_energy >= bound;
  rep.worst_sample = fmt::format("endpoint energy {}, sphere minimum {} over {} probes, bound {}",
                                 endpoint_energy, probe.min_energy, probe.probes, bound);
  return rep;
}

DiagnosticReport check_consistency(const Profile& p, const DiagnosticTolerances& tol) {
  DiagnosticReport rep;
  rep.name = "profile_consistency";
  rep.tolerance = tol.consistency;
  const auto r = p.grid->nodes();
  if (p.v.size() != r.size() || p.u.size() != r.size()) {
    return invalid(rep.name, "column length differs from node count", tol.consistency);
  }
  const auto& tc = default_transform();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double err = std::fabs(p.u[i] - tc.f(p.v[i])) / (1.0 + std::fabs(p.u[i]));
    if (!(err <= rep.worst_value) || i == 0) {
      rep.worst_value = err;
      rep.worst_location = r[i];
    }
  }
  const double vmin = *std::min_element(p.v.begin(), p.v.end());
  rep.pass = rep.worst_value <= tol.consistency && vmin >= 0.0 && p.v.back() == 0.0;
  rep.worst_sample = fmt::format("max |u - f(v)|/(1+|u|) = {} at r = {}; min v = {}; v(R_max) = {}",
                                 rep.worst_value, rep.worst_location, vmin, p.v.back());
  return rep;
}

DiagnosticReport check_decay(const Profile& p, const Potential& V, const DiagnosticTolerances& tol) {
  DiagnosticReport rep = straus_check(*p.grid, p.u, V);
  rep.name = "decay";
  rep.tolerance = tol.straus;
  const bool straus_ok = rep.worst_value <= tol.straus;
  const bool edge_ok = p.u.back() == 0.0;

  const std::size_t n = p.u.size();
  const std::size_t start =
      n - std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tol.tail_share * n)));
  // Rises below round-off relative to the profile's size are not resolvable.
  double sup = 0.0;
  for (double x : p.u) sup = std::max(sup, std::fabs(x));
  const double slack = tol.tail_rise * sup;
  std::size_t rise_at = n;
  for (std::size_t i = start; i + 1 < n; ++i) {
    if (p.u[i + 1] > p.u[i] + slack) {
      rise_at = i + 1;
      break;
    }
  }
  const bool tail_ok = rise_at == n;
  rep.pass = straus_ok && edge_ok && tail_ok;
  const auto r = p.grid->nodes();
  std::string s = rep.worst_sample;
  if (!edge_ok) s += fmt::format("; u(R_max) = {} is not zero", p.u.back());
  if (!tail_ok) s += fmt::format("; tail rises at r = {}", r[rise_at]);
  rep.worst_sample = s;
  return rep;
}

double tail_mass_fraction(const Profile& p, const Potential& V) {
  const RadialGrid& g = *p.grid;
  const auto r = g.nodes();
  const auto w = g.weights();
  const auto c = g.stiffness();
  const double R = tail_radius(V, g.r_max());
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    const double m = w[i] * p.u[i] * p.u[i];
    total += m;
    if (r[i] > R) tail += m;
  }
  for (std::size_t e = 0; e + 1 < p.u.size(); ++e) {
    const double d = p.u[e + 1] - p.u[e];
    const double m = c[e] * d * d;
    total += m;
    if (r[e] >= R) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

DiagnosticReport check_tail_mass(const Profile& p, const Potential& V,
                                 const DiagnosticTolerances& tol) {
  DiagnosticReport rep;
  rep.name = "tail_mass";
  rep.tolerance = tol.tail_mass;
  rep.worst_location = tail_radius(V, p.grid->r_max());
  rep.worst_value = tail_mass_fraction(p, V);
  rep.pass = rep.worst_value < tol.tail_mass;
  rep.worst_sample = fmt::format("share of int(|u'|^2 + u^2) beyond r = {} is {}",
                                 rep.worst_location, rep.worst_value);
  return rep;
}

double boundedness_slack(const Profile& p, const ProblemSpec& spec, double eps) {
  const DiscreteField v(p.grid, p.v);
  const DiscreteFunctional H(spec, p.grid, eps, FunctionalKind::truncated);
  const auto& tc = default_transform();
  const double theta = spec.nonlinearity().theta;
  const double k = spec.k();
  const EnergyParts parts = H.energy_parts(v.values());
  const std::vector<double> grad = H.gradient(v.values());
  double pairing = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double u = tc.f(v[i]);
    pairing += grad[i] * u / tc.f_prime_from_u(u);
  }
  const double lhs = parts.total(eps) - pairing / theta;
  const double rhs = (0.5 - 2.0 / theta) * eps * eps * parts.gradient +
                     (0.5 - 1.0 / theta) * (1.0 - 1.0 / k) * parts.potential;
  return lhs - rhs;
}

DiagnosticReport check_boundedness(const Profile& p, const ProblemSpec& spec, double eps,
                                   const DiagnosticTolerances& tol) {
  DiagnosticReport rep;
  rep.name = "boundedness_inequality";
  rep.tolerance = tol.inequality_slack;
  std::string why;
  if (!as_field(p, why)) return invalid(rep.name, why, tol.inequality_slack);
  rep.worst_location = eps;
  rep.worst_value = boundedness_slack(p, spec, eps);
  rep.pass = rep.worst_value >= -tol.inequality_slack;
  rep.worst_sample = fmt::format("slack {} at eps = {}", rep.worst_value, eps);
  return rep;
}

DiagnosticReport check_ps_diagnostics(const std::vector<SweepProfile>& sweep,
                                      const ProblemSpec& spec, const DiagnosticTolerances& tol) {
  DiagnosticReport rep;
  rep.name = "ps_diagnostics";
  rep.tolerance = tol.inequality_slack;
  if (sweep.size() < 2) {
    rep.pass = false;
    rep.worst_sample = fmt::format("needs at least 2 profiles, got {}", sweep.size());
    rep.worst_value = NAN;
    return rep;
  }
  const double theta = spec.nonlinearity().theta;
  const double coef = 0.5 - 2.0 / theta;
  bool ok = true;
  std::string notes;
  double worst_slack = INFINITY;
  double worst_tail = 0.0;
  for (const auto& s : sweep) {
    std::string why;
    if (!as_field(s.profile, why)) {
      ok = false;
      notes += fmt::format("; eps = {}: {}", s.eps, why);
      continue;
    }
    const double slack = boundedness_slack(s.profile, spec, s.eps);
    const double tail = tail_mass_fraction(s.profile, spec.potential());
    if (slack < worst_slack) {
      worst_slack = slack;
      rep.worst_location = s.eps;
    }
    worst_tail = std::max(worst_tail, tail);
    if (slack < -tol.inequality_slack) ok = false;
    if (!(tail < tol.tail_mass)) ok = false;
  }
  if (coef <= 0.0) {
    ok = false;
    notes += fmt::format("; marginal theta = {}: 1/2 - 2/theta = {} gives no gradient bound", theta,
                         coef);
  }
  rep.pass = ok;
  rep.worst_value = worst_slack;
  rep.worst_sample = fmt::format("min slack {} at eps = {}; max tail share {} (limit {}){}",
                                 worst_slack, rep.worst_location, worst_tail, tol.tail_mass, notes);
  return rep;
}

bool profile_coincides(const Profile& p, const ProblemSpec& spec) {
  const auto& tc = default_transform();
  const auto r = p.grid->nodes();
  const double a = spec.a();
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    if (!spec.potential().in_lambda_closure(r[i]) && tc.f(p.v[i]) > a * (1.0 + 1e-10)) return false;
  }
  return true;
}

double truncation_gap(const Profile& p, const ProblemSpec& spec) {
  const DiscreteFunctional H(spec, p.grid, 1.0, FunctionalKind::truncated);
  const DiscreteFunctional J(spec, p.grid, 1.0, FunctionalKind::original);
  const auto& tc = default_transform();
  const auto w = p.grid->weights();
  double gap = 0.0;
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    const double u = tc.f(p.v[i]);
    gap += w[i] * std::fabs(H.primitive_at(i, u) - J.primitive_at(i, u));
  }
  return gap;
}

DiagnosticReport compare_J_H(const Profile& p, const ProblemSpec& spec, double eps, bool coincide,
                             const DiagnosticTolerances& tol) {
  DiagnosticReport rep;
  rep.name = "compare_J_H";
  rep.tolerance = tol.energy_match;
  std::string why;
  const auto v = as_field(p, why);
  if (!v) return invalid(rep.name, why, tol.energy_match);
  const double eh = energy_H(*v, eps, spec);
  const double ej = energy_J(*v, eps, spec);
  const double gap = truncation_gap(p, spec);
  if (!coincide) {
    rep.pass = true;
    rep.worst_value = gap;
    rep.worst_sample = fmt::format("not coincident: E_J - E_H = {}, int|W - G| = {}", ej - eh, gap);
    return rep;
  }
  const auto gh = gradient_H(*v, eps, spec);
  const auto gj = gradient_J(*v, eps, spec);
  const auto r = p.grid->nodes();
  double worst_grad = 0.0;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const double d = std::fabs(gh[i] - gj[i]) / (1.0 + std::fabs(gh[i]));
    if (d > worst_grad) {
      worst_grad = d;
      rep.worst_location = r[i];
    }
  }
  const double de = std::fabs(ej - eh) / (1.0 + std::fabs(eh));
  rep.worst_value = std::max(de, worst_grad);
  rep.pass = de <= tol.energy_match && worst_grad <= tol.gradient_match;
  rep.worst_sample = fmt::format("|E_J - E_H|/(1+|E_H|) = {}; max gradient gap {} at r = {}; "
                                 "int|W - G| = {}",
                                 de, worst_grad, rep.worst_location, gap);
  return rep;
}

std::vector<DiagnosticReport> profile_diagnostics(const Profile& p, const ProblemSpec& spec,
                                                  double eps, const DiagnosticTolerances& tol) {
  std::vector<DiagnosticReport> out;
  out.push_back(check_consistency(p, tol));
  out.push_back(check_decay(p, spec.potential(), tol));
  out.push_back(check_tail_mass(p, spec.potential(), tol));
  out.push_back(check_boundedness(p, spec, eps, tol));
  std::string why;
  out.push_back(as_field(p, why) ? compare_J_H(p, spec, eps, profile_coincides(p, spec), tol)
                                 : invalid("compare_J_H", why, tol.energy_match));
  return out;
}

TestFunctionIdentity test_function_identity(const DiscreteField& v, const ProblemSpec& spec,
                                            double eps) {
  const DiscreteFunctional H(spec, v.grid_ptr(), eps, FunctionalKind::truncated);
  const auto& tc = default_transform();
  const RadialGrid& g = v.grid();
  const auto w = g.weights();
  const auto c = g.stiffness();
  const auto V = H.potential_values();
  const std::vector<double> grad = H.gradient(v.values());
  TestFunctionIdentity out;
  double lower = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = tc.f(v[i]);
    out.pairing += grad[i] * u / tc.f_prime_from_u(u);
    lower += w[i] * (V[i] * u * u - H.source(i, u) * u);
  }
  auto psi = [&](double x) {
    const double u = tc.f(x);
    return 1.0 + u * u / (1.0 + u * u);
  };
  double dirichlet = 0.0;
  for (std::size_t e = 0; e + 1 < v.size(); ++e) {
    const double dv = v[e + 1] - v[e];
    if (dv == 0.0) continue;
    const double mean = boost::math::quadrature::gauss<double, 10>::integrate(psi, v[e], v[e + 1]) / dv;
    dirichlet += c[e] * dv * dv * mean;
  }
  out.formula = eps * eps * dirichlet + lower;
  out.relative = std::fabs(out.pairing - out.formula) / std::max(std::fabs(out.formula), 1e-300);
  return out;
}

SweepTrends sweep_trends(const std::vector<RunReport>& reports, double tolerance,
                         double j_residual_limit) {
  SweepTrends t;
  t.tolerance = tolerance;
  t.j_residual_limit = j_residual_limit;
  if (reports.empty()) return t;
  auto good = [&](const RunReport& r) {
    return r.converged && r.coincide && r.j_residual_norm < j_residual_limit;
  };
  for (std::size_t i = reports.size(); i-- > 0;) {
    if (!good(reports[i])) break;
    t.eps_hat = reports[i].epsilon;
  }
  t.coincidence_monotone = true;
  bool seen = false;
  for (const auto& r : reports) {
    if (seen && !r.coincide) t.coincidence_monotone = false;
    seen = seen || r.coincide;
  }
  auto nonincreasing = [&](auto get) {
    for (std::size_t i = 1; i < reports.size(); ++i) {
      if (!reports[i].converged || !reports[i - 1].converged) return false;
      if (get(reports[i]) > (1.0 + tolerance) * get(reports[i - 1])) return false;
    }
    return true;
  };
  t.h1_nonincreasing = nonincreasing([](const RunReport& r) { return r.h1_norm_u; });
  t.sup_nonincreasing = nonincreasing([](const RunReport& r) { return r.sup_u_lambda_bar; });
  t.h1_halved = reports.front().converged && reports.back().converged &&
                reports.back().h1_norm_u < 0.5 * reports.front().h1_norm_u;
  return t;
}

}  // namespace qsol
