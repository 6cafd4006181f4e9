#include "qsol/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "qsol/errors.hpp"
#include "qsol/linalg.hpp"
#include "qsol/transform.hpp"

namespace qsol {

void MountainPassConfig::validate() const {
  if (path_points < 3) throw ValidationError(fmt::format("path_points must be >= 3, got {}", path_points));
  if (!(residual_tol > 0.0)) throw ValidationError("residual_tol must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ValidationError("backtrack must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5)) {
    throw ValidationError("sufficient_decrease must lie in (0, 0.5)");
  }
  if (max_outer_iters < 0 || max_newton_iters < 0) throw ValidationError("iteration caps must be >= 0");
  if (!(sphere_radius > 0.0)) throw ValidationError("sphere_radius must be > 0");
  if (!(path_tol > 0.0)) throw ValidationError("path_tol must be > 0");
  if (stall_window < 1) throw ValidationError("stall_window must be >= 1");
  if (!(endpoint_t_max >= 1.0)) throw ValidationError("endpoint_t_max must be >= 1");
  if (!(sup_cap > 0.0)) throw ValidationError("sup_cap must be > 0");
  if (!(path_perturbation >= 0.0 && path_perturbation < 0.5)) {
    throw ValidationError("path_perturbation must lie in [0, 0.5)");
  }
}

namespace {

using Vec = std::vector<double>;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// eps^2 K + diag(w (V + 1)) on the free nodes; SPD.
Tridiagonal sobolev_metric(const DiscreteFunctional& F) {
  const auto& grid = F.grid();
  const auto c = grid.stiffness();
  const auto w = grid.weights();
  const auto V = F.potential_values();
  const double e2 = F.eps() * F.eps();
  const std::size_t n = grid.size() - 1;
  Tridiagonal P;
  P.diag.resize(n);
  P.lower.resize(n - 1);
  P.upper.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    P.diag[i] = e2 * c[i] + w[i] * (V[i] + 1.0);
    if (i > 0) P.diag[i] += e2 * c[i - 1];
    if (i + 1 < n) P.lower[i] = P.upper[i] = -e2 * c[i];
  }
  return P;
}

double dot(std::span<const double> a, std::span<const double> b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double metric_dot(const Tridiagonal& P, std::span<const double> a, std::span<const double> b) {
  const Vec Pb = multiply(P, b);
  return dot(a, Pb, Pb.size());
}

void project_nonnegative(Vec& v) {
  for (double& x : v) x = std::fabs(x);
  v.back() = 0.0;
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void check_sup(const Vec& v, double cap, const char* where) {
  const double s = sup_norm(v);
  if (!(s <= cap)) {
    throw NumericalError(fmt::format("{}: iterate left the admissible region (sup |v| = {} > {})",
                                     where, s, cap),
                         v);
  }
}

Vec lift(std::span<const double> u_direction, double t) {
  const auto& tc = default_transform();
  Vec v(u_direction.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = tc.h(t * u_direction[i]);
  v.back() = 0.0;
  return v;
}

}  // namespace

std::vector<double> omega_bump(const RadialGrid& grid, const Potential& V) {
  const double center = 0.5 * (V.r1() + V.r2());
  const double half = 0.5 * (V.r2() - V.r1());
  const auto r = grid.nodes();
  Vec e(r.size(), 0.0);
  int inside = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double s = (r[i] - center) / half;
    if (std::fabs(s) < 1.0) {
      e[i] = std::exp(1.0 - 1.0 / (1.0 - s * s));
      ++inside;
    }
  }
  if (inside < 3) {
    throw ValidationError(
        fmt::format("Omega = ({}, {}) contains {} grid nodes; need at least 3", V.r1(), V.r2(), inside));
  }
  return e;
}

Endpoint make_endpoint(const ProblemSpec& spec, double eps, const GridPtr& grid,
                       const MountainPassConfig& config, std::optional<std::vector<double>> direction) {
  const DiscreteFunctional F(spec, grid, eps);
  Vec e = direction ? std::move(*direction) : omega_bump(*grid, spec.potential());
  if (e.size() != grid->size()) throw ValidationError("make_endpoint: direction size mismatch");
  for (double& x : e) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ValidationError("make_endpoint: direction must be finite and nonnegative");
    }
  }
  e.back() = 0.0;
  const double top = sup_norm(e);
  if (!(top > 0.0)) throw ValidationError("make_endpoint: direction vanishes identically");
  for (double& x : e) x /= top;

  for (double t = 1.0; t <= config.endpoint_t_max; t *= 2.0) {
    Vec v = lift(e, t);
    double energy = 0.0;
    try {
      energy = F.energy(v);
    } catch (const NumericalError&) {
      continue;
    }
    if (energy <= 0.0) return Endpoint{DiscreteField(grid, std::move(v)), t, std::move(e)};
  }
  throw NumericalError(fmt::format(
      "endpoint search failed: H(h(t e)) > 0 for all t <= {} (superlinear growth missing or grid "
      "too coarse)",
      config.endpoint_t_max));
}

MinimaxResult minimax_path(const Endpoint& endpoint, const MountainPassConfig& config, double eps,
                           const ProblemSpec& spec) {
  config.validate();
  const GridPtr& grid = endpoint.field.grid_ptr();
  const DiscreteFunctional F(spec, grid, eps);
  const Tridiagonal P = sobolev_metric(F);
  const SpdTridiagonalSolver Psolve(P);
  const std::size_t n = grid->size();
  const std::size_t nf = n - 1;
  const int np = config.path_points;
  const double c_armijo = config.sufficient_decrease;

  if (!(F.energy(endpoint.field.values()) <= 0.0)) {
    throw ValidationError("minimax_path: endpoint energy must be <= 0");
  }

  // Initial path along the scaling ray, with a seeded smooth perturbation of
  // the interior nodes.
  std::vector<Vec> path(np);
  {
    std::mt19937_64 rng(config.seed);
    const auto r = grid->nodes();
    for (int j = 0; j < np; ++j) {
      if (j == np - 1) {
        path[j].assign(endpoint.field.values().begin(), endpoint.field.values().end());
        continue;
      }
      const double s = static_cast<double>(j) / (np - 1);
      Vec u(endpoint.direction);
      if (j > 0 && config.path_perturbation > 0.0) {
        double xi[4];
        for (double& x : xi) x = 2.0 * uniform01(rng) - 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double m = 0.0;
          for (int k = 0; k < 4; ++k) m += xi[k] * std::sin((k + 1) * std::numbers::pi * r[i] / r.back());
          u[i] *= 1.0 + 0.25 * config.path_perturbation * m;
        }
      }
      path[j] = lift(u, s * endpoint.scale);
    }
  }
  const Vec v_end = path.back();

  MinimaxResult result{0.0, DiscreteField(grid), {}, {}, 0, false, 0.0, 0.0, {}};
  Vec energies(np);
  std::vector<double> step_size(np, 1.0);
  double best_normal = INFINITY;
  int best_iter = 0;
  Vec R(n), d(n), tau(n), trial(n);

  auto redistribute = [&]() {
    // Cumulative energy-arclength sqrt(|dv|_P^2 + dE^2), energies floored at
    // zero so the unbounded sublevel part of the path counts by geometry only.
    Vec arc(np, 0.0);
    for (int j = 1; j < np; ++j) {
      Vec diff(n);
      for (std::size_t i = 0; i < n; ++i) diff[i] = path[j][i] - path[j - 1][i];
      const double dv2 = metric_dot(P, diff, diff);
      const double dE = std::max(energies[j], 0.0) - std::max(energies[j - 1], 0.0);
      arc[j] = arc[j - 1] + std::sqrt(std::max(dv2, 0.0) + dE * dE);
    }
    if (!(arc.back() > 0.0)) return;
    std::vector<Vec> fresh(np);
    fresh.front() = path.front();
    fresh.back() = path.back();
    int seg = 0;
    for (int j = 1; j < np - 1; ++j) {
      const double target = arc.back() * j / (np - 1);
      while (seg < np - 2 && arc[seg + 1] < target) ++seg;
      const double len = arc[seg + 1] - arc[seg];
      const double lam = len > 0.0 ? std::clamp((target - arc[seg]) / len, 0.0, 1.0) : 0.0;
      fresh[j].resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        fresh[j][i] = (1.0 - lam) * path[seg][i] + lam * path[seg + 1][i];
      }
    }
    path.swap(fresh);
  };

  int it = 0;
  int peak = 1;
  for (;; ++it) {
    for (int j = 0; j < np; ++j) energies[j] = F.energy(path[j]);
    peak = 1;
    for (int j = 2; j < np - 1; ++j) {
      if (energies[j] > energies[peak]) peak = j;
    }
    if (!(energies[peak] > 0.0)) {
      throw NumericalError(
          fmt::format("geometry lost: path maximum {} is not positive", energies[peak]), path[peak]);
    }

    double max_normal = 0.0;
    if (it >= config.max_outer_iters) {
      result.hit_iteration_cap = true;
    }
    const bool last = result.hit_iteration_cap;
    // Trust region: no node moves farther than its shorter adjacent segment.
    Vec seg(np, 0.0);
    for (int j = 1; j < np; ++j) {
      Vec diff(n);
      for (std::size_t i = 0; i < n; ++i) diff[i] = path[j][i] - path[j - 1][i];
      seg[j] = std::sqrt(std::max(metric_dot(P, diff, diff), 0.0));
    }
    for (int j = 1; j < np - 1; ++j) {
      // Past the peak, nodes already in {H <= 0} complete an admissible
      // path and are left alone; the functional is unbounded below there.
      if (j > peak && energies[j] <= 0.0) continue;
      F.gradient(path[j], R);
      std::copy(R.begin(), R.begin() + nf, d.begin());
      d[nf] = 0.0;
      Psolve.solve(std::span<double>(d.data(), nf));
      for (std::size_t i = 0; i < n; ++i) tau[i] = path[j + 1][i] - path[j - 1][i];
      tau[nf] = 0.0;
      const double tnorm = std::sqrt(metric_dot(P, tau, tau));
      double along = 0.0;
      if (tnorm > 0.0) {
        for (double& x : tau) x /= tnorm;
        along = dot(R, tau, nf);
      }
      // Normal part of the Sobolev gradient; its P-norm squared is R.s.
      for (std::size_t i = 0; i < nf; ++i) d[i] -= along * tau[i];
      const double slope = dot(R, d, nf);
      const double normal = std::sqrt(std::max(slope, 0.0));
      max_normal = std::max(max_normal, normal);
      if (last || !(slope > 0.0)) continue;

      double alpha = std::min({2.0 * step_size[j], 4.0, std::min(seg[j], seg[j + 1]) / normal});
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls, alpha *= config.backtrack) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = path[j][i] - alpha * d[i];
        project_nonnegative(trial);
        double e_trial;
        try {
          e_trial = F.energy(trial);
        } catch (const NumericalError&) {
          continue;
        }
        if (e_trial <= energies[j] - c_armijo * alpha * slope) {
          accepted = true;
          break;
        }
      }
      if (accepted) {
        step_size[j] = alpha;
        check_sup(trial, config.sup_cap, "minimax_path");
        path[j].swap(trial);
        trial.resize(n);
      } else {
        step_size[j] = std::max(step_size[j] * config.backtrack, 1e-12);
      }
    }

    result.max_normal_residual = max_normal;
    if (max_normal < best_normal * 0.99) {
      best_normal = max_normal;
      best_iter = it;
    }
    if (last) break;
    if (max_normal < config.path_tol) break;
    if (it - best_iter >= config.stall_window) break;

    for (int j = 0; j < np; ++j) energies[j] = F.energy(path[j]);
    redistribute();
  }
  result.iterations = it;
  if (result.hit_iteration_cap) {
    result.warnings.push_back(
        fmt::format("minimax_path: iteration cap {} reached (path-normal residual {})",
                    config.max_outer_iters, result.max_normal_residual));
  }

  // Maximize H along the polygonal path through the nodes adjacent to the
  // peak.
  const Vec& left = path[peak - 1];
  const Vec& mid = path[peak];
  const Vec& right = path[peak + 1];
  auto point = [&](double s) {
    Vec v(n);
    const Vec& a = s < 1.0 ? left : mid;
    const Vec& b = s < 1.0 ? mid : right;
    const double lam = s < 1.0 ? s : s - 1.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = (1.0 - lam) * a[i] + lam * b[i];
    v.back() = 0.0;
    return v;
  };
  const auto best = boost::math::tools::brent_find_minima(
      [&](double s) { return -F.energy(point(s)); }, 0.0, 2.0, 26);
  Vec peak_field = mid;
  double c0 = energies[peak];
  if (-best.second > c0) {
    c0 = -best.second;
    peak_field = point(best.first);
  }

  // The first and last path nodes were never touched.
  path.back() = v_end;
  result.c0_estimate = c0;
  result.peak = DiscreteField(grid, peak_field);
  result.peak_residual = residual_norm(*grid, F.gradient(peak_field));
  result.path_energies = energies;
  result.path.reserve(np);
  for (auto& v : path) result.path.emplace_back(grid, std::move(v));
  return result;
}

RefineResult refine_critical_point(const DiscreteField& v_init, double eps, const ProblemSpec& spec,
                                   const MountainPassConfig& config) {
  config.validate();
  const GridPtr& grid = v_init.grid_ptr();
  const DiscreteFunctional F(spec, grid, eps);
  const std::size_t n = grid->size();
  const std::size_t nf = n - 1;
  const auto w = grid->weights();
  const double c_armijo = config.sufficient_decrease;

  Vec v(v_init.values().begin(), v_init.values().end());
  project_nonnegative(v);
  Vec R = F.gradient(v);
  double res = residual_norm(*grid, R);

  RefineResult out{DiscreteField(grid), res, 0, 0, {}};
  double energy = F.energy(v);
  out.energy_log.push_back(energy);

  int rising = 0;
  auto accept = [&](Vec& next, Vec& R_next, double res_next) {
    check_sup(next, config.sup_cap, "refine_critical_point");
    const double e_next = F.energy(next);
    rising = e_next > energy + 1e-12 * (1.0 + std::fabs(energy)) ? rising + 1 : 0;
    if (rising >= 10) {
      throw NumericalError("refine_critical_point: energy increased on 10 consecutive steps", next);
    }
    energy = e_next;
    out.energy_log.push_back(energy);
    v.swap(next);
    R.swap(R_next);
    res = res_next;
  };

  // Preconditioned descent on the merit m(v) = 1/2 |R|^2 with the lumped
  // inverse mass; used when Newton is singular or its line search fails.
  const Tridiagonal P = sobolev_metric(F);
  const SpdTridiagonalSolver Psolve(P);
  auto merit_flow = [&](int steps) {
    for (int s = 0; s < steps && res >= config.residual_tol; ++s) {
      Vec scaled(nf);
      for (std::size_t i = 0; i < nf; ++i) scaled[i] = R[i] / w[i];
      const Tridiagonal H = F.hessian(v);
      Vec g = multiply(H, scaled);  // merit gradient
      Vec d(g);
      Psolve.solve(d);
      const double slope = dot(g, d, nf);
      if (!(slope > 0.0)) return false;
      bool ok = false;
      for (double alpha = 1.0; alpha > 1e-14; alpha *= config.backtrack) {
        Vec next(v);
        for (std::size_t i = 0; i < nf; ++i) next[i] -= alpha * d[i];
        project_nonnegative(next);
        Vec R_next;
        try {
          R_next = F.gradient(next);
        } catch (const NumericalError&) {
          continue;
        }
        const double rn = residual_norm(*grid, R_next);
        if (0.5 * rn * rn <= 0.5 * res * res - c_armijo * alpha * slope) {
          accept(next, R_next, rn);
          ++out.flow_steps;
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };

  int stalled = 0;
  while (res >= config.residual_tol && out.newton_steps < config.max_newton_iters) {
    const Tridiagonal H = F.hessian(v);
    Vec delta(R.begin(), R.begin() + nf);
    for (double& x : delta) x = -x;
    const bool solved = solve_tridiagonal(H, delta);
    bool ok = false;
    if (solved) {
      for (double alpha = 1.0; alpha > 1e-10; alpha *= config.backtrack) {
        Vec next(v);
        for (std::size_t i = 0; i < nf; ++i) next[i] += alpha * delta[i];
        project_nonnegative(next);
        Vec R_next;
        try {
          R_next = F.gradient(next);
        } catch (const NumericalError&) {
          continue;
        }
        const double rn = residual_norm(*grid, R_next);
        if (rn * rn <= (1.0 - 2.0 * c_armijo * alpha) * res * res) {
          accept(next, R_next, rn);
          ok = true;
          break;
        }
      }
    }
    ++out.newton_steps;
    if (!ok) {
      if (!merit_flow(50) || ++stalled > 5) {
        if (res < config.residual_tol) break;
        throw NumericalError(
            fmt::format("refine_critical_point: no progress (residual {}, Jacobian {})", res,
                        solved ? "regular" : "singular"),
            v);
      }
    }
  }

  out.residual = res;
  out.field = DiscreteField(grid, std::move(v));
  return out;
}

Certificate certify_coincidence(const DiscreteField& v_star, const ProblemSpec& spec, double eps,
                                double residual_tol) {
  const auto& tc = default_transform();
  const auto r = v_star.grid().nodes();
  const Potential& V = spec.potential();
  Certificate c;
  for (std::size_t i = 0; i < v_star.size(); ++i) {
    const double u = tc.f(v_star[i]);
    if (V.in_lambda_closure(r[i])) {
      c.max_f_on_lambda_bar = std::max(c.max_f_on_lambda_bar, u);
    } else {
      c.max_f_off_lambda_bar = std::max(c.max_f_off_lambda_bar, u);
    }
  }
  const double a = spec.a();
  c.coincide = c.max_f_off_lambda_bar <= a * (1.0 + 1e-10) && c.max_f_on_lambda_bar < a;
  c.j_residual = residual_norm(v_star.grid(), gradient_J(v_star, eps, spec));
  c.j_residual_ok = !c.coincide || c.j_residual < 10.0 * residual_tol;
  return c;
}

SolveOutcome solve_epsilon(const ProblemSpec& spec, const GridPtr& grid, double eps,
                           const MountainPassConfig& config, const DiscreteField* warm_start) {
  SolveOutcome out;
  RunReport& rep = out.report;
  rep.epsilon = eps;
  rep.seed = config.seed;
  rep.a = spec.a();
  try {
    const Endpoint endpoint = make_endpoint(spec, eps, grid, config);
    MinimaxResult mp = minimax_path(endpoint, config, eps, spec);
    // The rescaled previous solution spans a second admissible path; the
    // mountain-pass value is an infimum over paths, so the lower peak wins.
    if (warm_start != nullptr) {
      Vec u = warm_start->transformed();
      if (sup_norm(u) > 0.0) {
        try {
          const Endpoint warm = make_endpoint(spec, eps, grid, config, std::move(u));
          MinimaxResult alt = minimax_path(warm, config, eps, spec);
          if (alt.c0_estimate < mp.c0_estimate) {
            alt.iterations += mp.iterations;
            mp = std::move(alt);
          } else {
            mp.iterations += alt.iterations;
          }
        } catch (const NumericalError& e) {
          mp.warnings.push_back(fmt::format("warm-start path discarded: {}", e.what()));
        }
      }
    }
    rep.c0_estimate = mp.c0_estimate;
    rep.minimax_iterations = mp.iterations;
    rep.warnings = mp.warnings;

    RefineResult ref = refine_critical_point(mp.peak, eps, spec, config);
    rep.newton_steps = ref.newton_steps;
    rep.flow_steps = ref.flow_steps;
    rep.residual_norm = ref.residual;

    const DiscreteField& v = ref.field;
    if (sup_norm(v.values()) < 1e-8) {
      out.failure_state.assign(v.values().begin(), v.values().end());
      throw NumericalError("refinement collapsed to the trivial critical point v = 0");
    }
    const Certificate cert = certify_coincidence(v, spec, eps, config.residual_tol);
    rep.max_f_on_lambda_bar = cert.max_f_on_lambda_bar;
    rep.max_f_off_lambda_bar = cert.max_f_off_lambda_bar;
    rep.coincide = cert.coincide;
    rep.j_residual_norm = cert.j_residual;
    if (!cert.j_residual_ok) {
      rep.warnings.push_back(fmt::format(
          "coincidence certified but J residual {} exceeds 10 x residual_tol", cert.j_residual));
    }

    const Vec u = v.transformed();
    rep.h1_norm_u = h1_norm(*grid, u);
    rep.x_norm_u = x_norm(*grid, u, spec.potential());
    const auto r = grid->nodes();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (spec.potential().in_lambda_closure(r[i])) rep.sup_u_lambda_bar = std::max(rep.sup_u_lambda_bar, u[i]);
    }
    rep.energy_H = energy_H(v, eps, spec);
    rep.energy_J = energy_J(v, eps, spec);
    rep.converged = ref.residual < config.residual_tol;
    if (!rep.converged) {
      rep.warnings.push_back(fmt::format("Newton cap reached with residual {}", ref.residual));
    }
    out.profile = v;
  } catch (const NumericalError& e) {
    rep.error = e.what();
    if (out.failure_state.empty()) out.failure_state = e.state();
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return out;
}

std::vector<SolveOutcome> epsilon_sweep(const std::vector<double>& eps_list, const ProblemSpec& spec,
                                        const GridPtr& grid, const MountainPassConfig& config,
                                        const SweepOptions& options) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ValidationError("epsilon values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ValidationError("epsilon list must be strictly decreasing");
    }
  }
  std::vector<SolveOutcome> out(eps_list.size());
  if (options.parallel) {
    std::vector<std::future<SolveOutcome>> jobs;
    for (double eps : eps_list) {
      jobs.push_back(std::async(std::launch::async,
                                [&, eps] { return solve_epsilon(spec, grid, eps, config); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
    return out;
  }
  const DiscreteField* previous = nullptr;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    out[i] = solve_epsilon(spec, grid, eps_list[i], config, options.warm_start ? previous : nullptr);
    if (out[i].profile && out[i].report.converged) previous = &*out[i].profile;
  }
  return out;
}

double sphere_functional(const DiscreteFunctional& F, std::span<const double> v) {
  const EnergyParts p = F.energy_parts(v);
  return F.eps() * F.eps() * p.gradient + p.potential;
}

SphereProbe sphere_probe(const ProblemSpec& spec, double eps, const GridPtr& grid, double rho,
                         int n_probes, std::uint64_t seed) {
  if (!(rho > 0.0) || n_probes < 1) throw ValidationError("sphere_probe: need rho > 0 and n_probes >= 1");
  const DiscreteFunctional F(spec, grid, eps);
  const auto r = grid->nodes();
  const auto& tc = default_transform();
  const double reach = std::min(r.back(), 2.0 * spec.potential().R2());
  std::mt19937_64 rng(seed);

  SphereProbe probe;
  probe.min_energy = INFINITY;
  probe.lower_bound = (spec.k() - 1.0) / (4.0 * spec.k()) * rho * rho;
  while (probe.probes < n_probes) {
    Vec v0(r.size(), 0.0);
    for (int m = 0; m < 4; ++m) {
      const double center = reach * uniform01(rng);
      const double width = 0.2 + 1.8 * uniform01(rng);
      const double amp = 0.1 + 0.9 * uniform01(rng);
      for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double s = (r[i] - center) / width;
        if (std::fabs(s) < 1.0) v0[i] += amp * (1.0 - s * s) * (1.0 - s * s);
      }
    }
    const double D = grid->dirichlet(v0);
    double pot = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) pot += grid->weights()[i] * F.potential_values()[i] * v0[i] * v0[i];
    if (!(D > 0.0)) continue;

    // Q(c) = eps^2 c^2 D + int V f(c v0)^2 is increasing, and
    // eps^2 c^2 D <= Q(c) <= c^2 (eps^2 D + int V v0^2) brackets the root.
    auto Q = [&](double c) {
      double s = eps * eps * c * c * D;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double u = tc.f(c * v0[i]);
        s += grid->weights()[i] * F.potential_values()[i] * u * u;
      }
      return s - rho * rho;
    };
    const double lo = rho / std::sqrt(eps * eps * D + pot);
    const double hi = rho / (eps * std::sqrt(D));
    double c = lo;
    if (hi > lo * (1.0 + 1e-14)) {
      std::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(Q, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
      c = 0.5 * (br.first + br.second);
    }
    Vec v(v0);
    for (double& x : v) x *= c;
    probe.min_energy = std::min(probe.min_energy, F.energy(v));
    ++probe.probes;
  }
  return probe;
}

}  // namespace qsol
