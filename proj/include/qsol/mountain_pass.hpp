#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsol/functional.hpp"
#include "qsol/grid.hpp"
#include "qsol/problem.hpp"

namespace qsol {

struct MountainPassConfig {
  int path_points = 41;
  /// Backtracking factor and Armijo constant for every line search.
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  /// Cap on path-deformation rounds.
  int max_outer_iters = 4000;
  double residual_tol = 1e-8;
  /// Radius of the sphere used by the geometry probe.
  double sphere_radius = 1e-2;
  std::uint64_t seed = 0;
  /// Relative amplitude of the seeded perturbation of the initial path.
  double path_perturbation = 1e-3;
  int max_newton_iters = 200;
  /// Path deformation stops once the largest path-normal residual falls
  /// below this, or once the peak residual stalls.
  double path_tol = 1e-6;
  int stall_window = 200;
  double endpoint_t_max = 1e6;
  /// Abort when any iterate exceeds this in sup-norm.
  double sup_cap = 1e6;

  /// Throws ValidationError.
  void validate() const;
};

/// Smooth bump exp(1 - 1/(1 - s^2)) supported in Omega, peak value 1.
std::vector<double> omega_bump(const RadialGrid& grid, const Potential& V);

struct Endpoint {
  DiscreteField field;  // v1 = h(t e) nodewise
  double scale = 0.0;   // t
  std::vector<double> direction;  // e, sup-normalized
};

/// Scales t = 1, 2, 4, ... until H(h(t e)) <= 0. `direction` defaults to
/// omega_bump; it must vanish at the edge and be nonnegative.
Endpoint make_endpoint(const ProblemSpec& spec, double eps, const GridPtr& grid,
                       const MountainPassConfig& config = {},
                       std::optional<std::vector<double>> direction = std::nullopt);

struct MinimaxResult {
  double c0_estimate = 0.0;
  DiscreteField peak;
  /// Final discrete path, endpoints included.
  std::vector<DiscreteField> path;
  std::vector<double> path_energies;
  int iterations = 0;
  bool hit_iteration_cap = false;
  double peak_residual = 0.0;
  double max_normal_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Discrete mountain-pass value inf over paths of max H along the path.
///
/// The path starts on the ray j -> h(s_j t e) and is deformed by Armijo
/// descent steps along the path-normal part of the Sobolev gradient of H,
/// followed by redistribution to equal energy-arclength. Endpoints are never
/// modified. Returns the maximum of H along the final path (refined between
/// the nodes adjacent to the peak) and the maximizing field.
MinimaxResult minimax_path(const Endpoint& endpoint, const MountainPassConfig& config, double eps,
                           const ProblemSpec& spec);

struct RefineResult {
  DiscreteField field;
  double residual = 0.0;
  int newton_steps = 0;
  int flow_steps = 0;
  std::vector<double> energy_log;
};

/// Newton iteration on the weak-form residual of H with a merit line search
/// on the residual norm, falling back to preconditioned descent on the
/// merit function when the Jacobian is singular or the search stalls. The
/// iterate is replaced by |v| after every step.
RefineResult refine_critical_point(const DiscreteField& v_init, double eps, const ProblemSpec& spec,
                                   const MountainPassConfig& config);

struct Certificate {
  /// max of f(v) over the closed annulus R1 <= r <= R2.
  double max_f_on_lambda_bar = 0.0;
  /// max of f(v) over nodes outside the closed annulus.
  double max_f_off_lambda_bar = 0.0;
  bool coincide = false;
  /// Residual norm of the gradient of J at v.
  double j_residual = 0.0;
  /// coincide implies j_residual < 10 residual_tol.
  bool j_residual_ok = true;
};

Certificate certify_coincidence(const DiscreteField& v_star, const ProblemSpec& spec, double eps,
                                double residual_tol);

struct RunReport {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double c0_estimate = 0.0;
  double residual_norm = 0.0;
  double max_f_on_lambda_bar = 0.0;
  double max_f_off_lambda_bar = 0.0;
  double a = 0.0;
  bool coincide = false;
  double j_residual_norm = 0.0;
  double h1_norm_u = 0.0;
  double x_norm_u = 0.0;
  /// sup of u over R1 <= r <= R2.
  double sup_u_lambda_bar = 0.0;
  double energy_H = 0.0;
  double energy_J = 0.0;
  int minimax_iterations = 0;
  int newton_steps = 0;
  int flow_steps = 0;
  bool converged = false;
  std::vector<std::string> warnings;
  std::string error;

  bool certified() const { return converged && coincide; }
};

struct SolveOutcome {
  RunReport report;
  std::optional<DiscreteField> profile;
  /// Iterate at the moment of a numerical failure, when available.
  std::vector<double> failure_state;
};

/// Full pipeline at one epsilon: endpoint, minimax, refinement,
/// certification. Never throws for numerical failures; they are recorded in
/// the report. `warm_start` is a previous solution; its profile f(v) gives a
/// second candidate path next to the default bump ray.
SolveOutcome solve_epsilon(const ProblemSpec& spec, const GridPtr& grid, double eps,
                           const MountainPassConfig& config,
                           const DiscreteField* warm_start = nullptr);

struct SweepOptions {
  bool warm_start = true;
  /// Solves entries concurrently; implies no warm start.
  bool parallel = false;
};

/// Runs solve_epsilon over a strictly decreasing list of epsilons.
std::vector<SolveOutcome> epsilon_sweep(const std::vector<double>& eps_list,
                                        const ProblemSpec& spec, const GridPtr& grid,
                                        const MountainPassConfig& config,
                                        const SweepOptions& options = {});

/// eps^2 int |v'|^2 + int V f(v)^2, the squared radius used by the sphere
/// probe.
double sphere_functional(const DiscreteFunctional& F, std::span<const double> v);

struct SphereProbe {
  double min_energy = 0.0;
  double lower_bound = 0.0;  // (k-1)/(4k) rho^2
  int probes = 0;
};

/// Minimum of H over `n_probes` seeded random nonnegative fields scaled onto
/// the sphere eps^2 int |v'|^2 + int V f(v)^2 = rho^2.
SphereProbe sphere_probe(const ProblemSpec& spec, double eps, const GridPtr& grid, double rho,
                         int n_probes, std::uint64_t seed);

}  // namespace qsol
