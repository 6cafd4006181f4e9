#include <cmath>

#include "doctest.h"
#include "qsol/analysis.hpp"
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

// Converged solutions at two epsilons, computed once.
const std::vector<SweepProfile>& solved() {
  static const std::vector<SweepProfile> s = [] {
    std::vector<SweepProfile> out;
    for (double eps : {0.5, 0.1}) {
      const SolveOutcome o = solve_epsilon(spec13(), small_grid(), eps, {});
      REQUIRE(o.report.converged);
      out.push_back({eps, make_profile(*o.profile, spec13().potential())});
    }
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("geometry check") {
  const DiagnosticReport ok = check_geometry(spec13(), 0.1, small_grid());
  CHECK(ok.pass);
  DiagnosticTolerances far;
  far.probe_radius = 1e3;
  const DiagnosticReport big = check_geometry(spec13(), 0.1, small_grid(), far);
  CHECK_FALSE(big.pass);
}

TEST_CASE("decay on zero, solved and edge-violating profiles") {
  const Profile zero = make_profile(DiscreteField(small_grid()), spec13().potential());
  CHECK(check_decay(zero, spec13().potential()).pass);
  for (const auto& s : solved()) CHECK(check_decay(s.profile, spec13().potential()).pass);
  Profile bad = solved().back().profile;
  bad.u.back() = 0.1;
  const DiagnosticReport rep = check_decay(bad, spec13().potential());
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(check_consistency(bad).pass);
}

TEST_CASE("tail mass") {
  for (const auto& s : solved()) CHECK(check_tail_mass(s.profile, spec13().potential()).pass);
  CHECK(tail_radius(spec13().potential(), 16.0) == 8.0);
  CHECK(tail_radius(spec13().potential(), 100.0) == 16.0);
  // heavy tail: constant beyond the annulus
  std::vector<double> v(small_grid()->size());
  const auto r = small_grid()->nodes();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = r[i] > 6.0 ? 1.0 : 0.0;
  const Profile heavy = make_profile(DiscreteField(small_grid(), v), spec13().potential());
  CHECK_FALSE(check_tail_mass(heavy, spec13().potential()).pass);
  CHECK_FALSE(check_ps_diagnostics({solved()[0], {0.05, heavy}}, spec13()).pass);
}

TEST_CASE("boundedness inequality") {
  for (const auto& s : solved()) CHECK(check_boundedness(s.profile, spec13(), s.eps).pass);
  CHECK(check_ps_diagnostics(solved(), spec13()).pass);
  CHECK_FALSE(check_ps_diagnostics({solved()[0]}, spec13()).pass);

  // theta = 4: the gradient coefficient 1/2 - 2/theta vanishes
  const ProblemSpec cubic(3, build_tent_potential(1, 2, 3, 4, 1), power_nonlinearity(3), 4.0);
  const DiagnosticReport marginal = check_ps_diagnostics(solved(), cubic);
  CHECK_FALSE(marginal.pass);
  CHECK(marginal.worst_sample.find("marginal theta") != std::string::npos);
}

TEST_CASE("compare J and H") {
  const Profile zero = make_profile(DiscreteField(small_grid()), spec13().potential());
  const DiagnosticReport z = compare_J_H(zero, spec13(), 0.1, true);
  CHECK(z.pass);
  CHECK(z.worst_value == 0.0);

  const SweepProfile& small = solved().back();
  REQUIRE(profile_coincides(small.profile, spec13()));
  CHECK(compare_J_H(small.profile, spec13(), small.eps, true).pass);

  const auto& tc = default_transform();
  std::vector<double> v(small_grid()->size(), 0.0);
  v[8] = tc.h(3.0 * spec13().a());
  const Profile over = make_profile(DiscreteField(small_grid(), v), spec13().potential());
  CHECK_FALSE(profile_coincides(over, spec13()));
  const DiagnosticReport diff = compare_J_H(over, spec13(), 0.1, false);
  CHECK(diff.worst_value > 0.0);
  CHECK(diff.worst_value == doctest::Approx(truncation_gap(over, spec13())));
  // claiming coincidence on a field that does not coincide fails
  CHECK_FALSE(compare_J_H(over, spec13(), 0.1, true).pass);
}

TEST_CASE("sweep trends") {
  auto rep = [](double eps, bool coincide, double h1, double sup) {
    RunReport r;
    r.epsilon = eps;
    r.converged = true;
    r.coincide = coincide;
    r.h1_norm_u = h1;
    r.sup_u_lambda_bar = sup;
    return r;
  };
  const SweepTrends t = sweep_trends({rep(1, false, 10, 2), rep(0.5, true, 10.5, 1.5), rep(0.1, true, 4, 1.6)});
  CHECK(t.eps_hat == 0.5);
  CHECK(t.coincidence_monotone);
  CHECK(t.h1_nonincreasing);
  CHECK(t.h1_halved);
  CHECK(t.sup_nonincreasing);

  const SweepTrends u = sweep_trends({rep(1, true, 10, 2), rep(0.5, false, 12, 3), rep(0.1, true, 6, 1)});
  CHECK(u.eps_hat == 0.1);
  CHECK_FALSE(u.coincidence_monotone);
  CHECK_FALSE(u.h1_nonincreasing);
  CHECK_FALSE(u.h1_halved);
  CHECK_FALSE(u.sup_nonincreasing);
}

TEST_CASE("profile diagnostics are deterministic") {
  const auto& s = solved().front();
  const auto a = profile_diagnostics(s.profile, spec13(), s.eps);
  const auto b = profile_diagnostics(s.profile, spec13(), s.eps);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].worst_sample == b[i].worst_sample);
    CHECK(a[i].pass);
  }
}
