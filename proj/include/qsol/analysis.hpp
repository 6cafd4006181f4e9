#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsol/diagnostic.hpp"
#include "qsol/grid.hpp"
#include "qsol/mountain_pass.hpp"
#include "qsol/problem.hpp"

namespace qsol {

/// Stored solution: nodal v, u = f(v) and V(r) on a grid. Loaded profiles
/// carry the columns as written, so u may disagree with f(v) if tampered.
struct Profile {
  GridPtr grid;
  std::vector<double> v;
  std::vector<double> u;
  std::vector<double> V;
};

Profile make_profile(const DiscreteField& v, const Potential& V);

/// All tolerances used by the diagnostics.
struct DiagnosticTolerances {
  double probe_radius = 1e-2;
  int probes = 100;
  double geometry_slack = 0.5;  // probe minimum >= slack * (k-1)/(4k) rho^2
  double consistency = 1e-10;   // |u - f(v)| <= tol (1 + |u|)
  double straus = 1.0;          // max ratio |u| r^{1/2} / (2 pi ||u||_X)
  double tail_share = 0.1;      // monotone tail test on the last share of nodes
  double tail_rise = 1e-14;     // allowed rise, relative to sup |u|
  double tail_mass = 1e-3;
  double inequality_slack = 1e-8;
  double energy_match = 1e-10;
  double gradient_match = 1e-10;
};

/// Radius beyond which tail mass is measured: min(4 R2, R_max / 2).
double tail_radius(const Potential& V, double r_max);

/// Endpoint with negative energy exists and the sphere probe minimum at
/// radius rho clears the slackened (k-1)/(4k) rho^2 bound.
DiagnosticReport check_geometry(const ProblemSpec& spec, double eps, const GridPtr& grid,
                                const DiagnosticTolerances& tol = {}, std::uint64_t seed = 0);

/// u column agrees with f(v), v >= 0 and v vanishes at the edge.
DiagnosticReport check_consistency(const Profile& p, const DiagnosticTolerances& tol = {});

/// Straus bound at every node r > 0, u(R_max) == 0 exactly, and u
/// nonincreasing over the outer tail of nodes.
DiagnosticReport check_decay(const Profile& p, const Potential& V,
                             const DiagnosticTolerances& tol = {});

/// Share of int(|u'|^2 + u^2) carried by r > tail_radius.
double tail_mass_fraction(const Profile& p, const Potential& V);
DiagnosticReport check_tail_mass(const Profile& p, const Potential& V,
                                 const DiagnosticTolerances& tol = {});

/// Slack of
///   H(v) - <H'(v), f(v)/f'(v)>/theta
///     - (1/2 - 2/theta) eps^2 int|v'|^2 - (1/2 - 1/theta)(1 - 1/k) int V f(v)^2.
double boundedness_slack(const Profile& p, const ProblemSpec& spec, double eps);
DiagnosticReport check_boundedness(const Profile& p, const ProblemSpec& spec, double eps,
                                   const DiagnosticTolerances& tol = {});

struct SweepProfile {
  double eps = 0.0;
  Profile profile;
};

/// Boundedness inequality on every profile plus tail mass; needs at least
/// two profiles. Flags marginal theta (1/2 - 2/theta <= 0).
DiagnosticReport check_ps_diagnostics(const std::vector<SweepProfile>& sweep,
                                      const ProblemSpec& spec,
                                      const DiagnosticTolerances& tol = {});

/// max f(v) off the closed annulus <= a, i.e. J and H agree on the profile.
bool profile_coincides(const Profile& p, const ProblemSpec& spec);

/// int |W(x, f(v)) - G(f(v))|.
double truncation_gap(const Profile& p, const ProblemSpec& spec);

/// When `coincide`, energies and gradients of J and H agree; otherwise the
/// report only quantifies the truncation gap.
DiagnosticReport compare_J_H(const Profile& p, const ProblemSpec& spec, double eps, bool coincide,
                             const DiagnosticTolerances& tol = {});

/// Every per-profile diagnostic (consistency, decay, tail mass,
/// boundedness, J/H comparison) in a fixed order.
std::vector<DiagnosticReport> profile_diagnostics(const Profile& p, const ProblemSpec& spec,
                                                  double eps,
                                                  const DiagnosticTolerances& tol = {});

/// <H'(v), phi> with phi = f(v)/f'(v) against
///   eps^2 int (1 + f^2/(1 + f^2)) |v'|^2 + int V f^2 - int w(x, f) f
/// evaluated with the grid's quadrature: per cell, the weight of |v'|^2 is
/// the cell measure times the mean of the integrand along the linear v,
/// taken by Gauss-Legendre.
struct TestFunctionIdentity {
  double pairing = 0.0;
  double formula = 0.0;
  double relative = 0.0;  // |pairing - formula| / max(|formula|, tiny)
};
TestFunctionIdentity test_function_identity(const DiscreteField& v, const ProblemSpec& spec,
                                            double eps);

/// Sweep-level trends over reports ordered by decreasing epsilon.
struct SweepTrends {
  /// Largest epsilon from which every smaller one is converged, coincident
  /// and has a J residual below j_residual_limit.
  std::optional<double> eps_hat;
  /// Once coincide holds it holds for every smaller epsilon.
  bool coincidence_monotone = false;
  /// Each value at most (1 + tolerance) times its predecessor.
  bool h1_nonincreasing = false;
  /// Last h1 norm below half the first.
  bool h1_halved = false;
  bool sup_nonincreasing = false;
  double tolerance = 0.1;
  double j_residual_limit = 1e-7;
};

SweepTrends sweep_trends(const std::vector<RunReport>& reports, double tolerance = 0.1,
                         double j_residual_limit = 1e-7);

}  // namespace qsol
