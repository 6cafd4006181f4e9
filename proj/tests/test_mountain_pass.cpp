#include <cmath>

#include "doctest.h"
#include "qsol/errors.hpp"
#include "qsol/mountain_pass.hpp"
#include "qsol/transform.hpp"

using namespace qsol;

namespace {

const ProblemSpec& spec13() {
  static const ProblemSpec s = canonical_problem(13);
  return s;
}

GridPtr small_grid() {
  static const GridPtr g = RadialGrid::build(3, 16.0, 256);
  return g;
}

}  // namespace

TEST_CASE("config validation") {
  MountainPassConfig c;
  CHECK_NOTHROW(c.validate());
  c.path_points = 2;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.residual_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("omega bump") {
  const auto b = omega_bump(*small_grid(), spec13().potential());
  const auto r = small_grid()->nodes();
  double peak = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!spec13().potential().in_omega(r[i])) CHECK(b[i] == 0.0);
    CHECK(b[i] >= 0.0);
    peak = std::max(peak, b[i]);
  }
  CHECK(peak == doctest::Approx(1.0));
}

TEST_CASE("endpoint search") {
  const Endpoint e = make_endpoint(spec13(), 1.0, small_grid());
  CHECK(energy_H(e.field, 1.0, spec13()) <= 0.0);
  double sup = 0.0;
  for (double x : e.field.values()) sup = std::max(sup, x);
  CHECK(sup > 0.0);
  // doubling the scale keeps the energy nonpositive
  const auto& tc = default_transform();
  std::vector<double> v2(e.direction.size());
  for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = tc.h(2.0 * e.scale * e.direction[i]);
  CHECK(energy_H(DiscreteField(small_grid(), v2), 1.0, spec13()) <= 0.0);
}

TEST_CASE("endpoint search fails for asymptotically linear g") {
  const Nonlinearity g = custom_nonlinearity([](double t) { return t * t * t / (1.0 + t * t); }, 4.0);
  const ProblemSpec s(3, build_tent_potential(1, 2, 3, 4, 1), g, 4.0);
  CHECK_THROWS_AS(make_endpoint(s, 1.0, small_grid()), NumericalError);
}

TEST_CASE("minimax, refinement and certification at eps = 1") {
  MountainPassConfig cfg;
  const Endpoint e = make_endpoint(spec13(), 1.0, small_grid(), cfg);
  const MinimaxResult mp = minimax_path(e, cfg, 1.0, spec13());
  CHECK(mp.c0_estimate > 0.0);
  REQUIRE(mp.path.size() == static_cast<std::size_t>(cfg.path_points));
  for (double x : mp.path.front().values()) CHECK(x == 0.0);
  const auto last = mp.path.back().values();
  const auto ev = e.field.values();
  CHECK(std::equal(last.begin(), last.end(), ev.begin(), ev.end()));
  double top = -INFINITY;
  for (double x : mp.path_energies) top = std::max(top, x);
  CHECK(mp.c0_estimate >= top - 1e-12 * std::fabs(top));

  const RefineResult rr = refine_critical_point(mp.peak, 1.0, spec13(), cfg);
  CHECK(rr.residual < cfg.residual_tol);
  double sup = 0.0;
  for (double x : rr.field.values()) {
    CHECK(x >= 0.0);
    sup = std::max(sup, x);
  }
  CHECK(sup > 1e-3);
  CHECK(energy_H(rr.field, 1.0, spec13()) <= mp.c0_estimate * (1.0 + 1e-9));

  // a second refinement starts at a critical point
  const RefineResult again = refine_critical_point(rr.field, 1.0, spec13(), cfg);
  CHECK(again.newton_steps == 0);
  CHECK(again.flow_steps == 0);
}

TEST_CASE("certificate on synthetic fields") {
  const auto& tc = default_transform();
  const double a = spec13().a();
  CHECK(certify_coincidence(DiscreteField(small_grid()), spec13(), 1.0, 1e-8).coincide);
  std::vector<double> v(small_grid()->size(), 0.0);
  v[8] = tc.h(2.0 * a);  // r = 0.5, off Lambda
  const Certificate c = certify_coincidence(DiscreteField(small_grid(), v), spec13(), 1.0, 1e-8);
  CHECK_FALSE(c.coincide);
  CHECK(c.max_f_off_lambda_bar == doctest::Approx(2.0 * a));
  std::vector<double> w(small_grid()->size(), 0.0);
  w[40] = tc.h(a);  // r = 2.5, inside: max on Lambda-bar must stay strictly below a
  CHECK_FALSE(certify_coincidence(DiscreteField(small_grid(), w), spec13(), 1.0, 1e-8).coincide);
}

TEST_CASE("sphere probe") {
  const SphereProbe p = sphere_probe(spec13(), 1.0, small_grid(), 1e-2, 100, 0);
  CHECK(p.probes == 100);
  CHECK(p.lower_bound == doctest::Approx(3.0 / 16.0 * 1e-4));
  CHECK(p.min_energy > 0.0);
  CHECK(p.min_energy >= 0.5 * p.lower_bound);
  // (k - 1)/(4k) increases towards 1/4
  double prev = 0.0;
  for (double k : {2.5, 4.0, 10.0, 100.0, 1e6}) {
    const double c = (k - 1.0) / (4.0 * k);
    CHECK(c > prev);
    CHECK(c < 0.25);
    prev = c;
  }
}

TEST_CASE("solve is deterministic and the residual contract holds") {
  MountainPassConfig cfg;
  cfg.seed = 3;
  const SolveOutcome a = solve_epsilon(spec13(), small_grid(), 0.5, cfg);
  const SolveOutcome b = solve_epsilon(spec13(), small_grid(), 0.5, cfg);
  REQUIRE(a.report.converged);
  CHECK(a.report.seed == 3);
  CHECK(a.report.c0_estimate > 0.0);
  CHECK(a.report.residual_norm == b.report.residual_norm);
  CHECK(a.report.energy_H == b.report.energy_H);
  const auto va = a.profile->values();
  const auto vb = b.profile->values();
  CHECK(std::equal(va.begin(), va.end(), vb.begin(), vb.end()));
  const double recomputed = residual_norm(*small_grid(), gradient_H(*a.profile, 0.5, spec13()));
  CHECK(std::fabs(recomputed - a.report.residual_norm) <= 1e-12);
  CHECK(a.profile->values().back() == 0.0);
}

TEST_CASE("sup cap aborts with a state dump") {
  MountainPassConfig cfg;
  cfg.sup_cap = 0.05;
  const SolveOutcome o = solve_epsilon(spec13(), small_grid(), 1.0, cfg);
  CHECK_FALSE(o.report.converged);
  CHECK_FALSE(o.report.error.empty());
}

TEST_CASE("sweep input validation") {
  MountainPassConfig cfg;
  CHECK_THROWS_AS(epsilon_sweep({0.1, 0.5}, spec13(), small_grid(), cfg), ValidationError);
  CHECK_THROWS_AS(epsilon_sweep({0.5, -0.1}, spec13(), small_grid(), cfg), ValidationError);
}

TEST_CASE("parallel cold sweep matches sequential cold solves") {
  MountainPassConfig cfg;
  SweepOptions opt;
  opt.warm_start = false;
  opt.parallel = true;
  const auto par = epsilon_sweep({0.5, 0.25}, spec13(), small_grid(), cfg, opt);
  REQUIRE(par.size() == 2);
  const SolveOutcome seq = solve_epsilon(spec13(), small_grid(), 0.25, cfg);
  CHECK(par[1].report.epsilon == 0.25);
  CHECK(par[1].report.energy_H == seq.report.energy_H);
}
