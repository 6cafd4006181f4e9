#include "qsol/cli.hpp"

#include <cmath>
#include <iostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "qsol/errors.hpp"

namespace qsol::cli {

namespace fs = std::filesystem;

namespace {

bool report_invalid(const RunConfig& cfg, std::ostream& log) {
  const auto failed = validate_config(cfg);
  for (const auto& d : failed) fmt::print(log, "invalid config: {}: {}\n", d.name, d.worst_sample);
  return !failed.empty();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void write_outcome(const SolveOutcome& o, const RunConfig& cfg, const ProblemSpec& spec,
                   const RadialGrid& grid, const fs::path& out) {
  const double eps = o.report.epsilon;
  if (o.profile) write_profile_csv(profile_path(out, eps), make_profile(*o.profile, spec.potential()));
  if (!o.failure_state.empty()) {
    write_failure_csv(out / fmt::format("failure_eps{}.csv", eps_label(eps)), grid, o.failure_state);
  }
  write_text(report_path(out, eps), report_to_json(o.report, cfg));
}

void log_report(const RunReport& r, std::ostream& log) {
  if (r.converged) {
    fmt::print(log, "eps={}: residual {:.3g}, c0 {:.6g}, max f on/off {:.6g}/{:.3g}, a {:.6g}, coincide {}\n",
               r.epsilon, r.residual_norm, r.c0_estimate, r.max_f_on_lambda_bar,
               r.max_f_off_lambda_bar, r.a, r.coincide);
  } else {
    fmt::print(log, "eps={}: failed: {}\n", r.epsilon, r.error);
  }
  for (const auto& w : r.warnings) fmt::print(log, "eps={}: warning: {}\n", r.epsilon, w);
}

std::optional<fs::path> sibling_report(const fs::path& profile) {
  const std::string name = profile.filename().string();
  const std::string head = "profile_eps";
  const std::string tail = ".csv";
  if (!name.starts_with(head) || !name.ends_with(tail)) return std::nullopt;
  const std::string label = name.substr(head.size(), name.size() - head.size() - tail.size());
  return profile.parent_path() / fmt::format("report_eps{}.json", label);
}

}  // namespace

int cmd_solve(const RunConfig& cfg, double eps, const fs::path& out, std::ostream& log) {
  if (report_invalid(cfg, log)) return kError;
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    fmt::print(log, "invalid epsilon {}\n", eps);
    return kError;
  }
  const ProblemSpec spec = build_problem(cfg.problem);
  const GridPtr grid = build_grid(cfg);
  const SolveOutcome o = solve_epsilon(spec, grid, eps, solver_config(cfg));
  ensure_dir(out);
  write_outcome(o, cfg, spec, *grid, out);
  log_report(o.report, log);
  if (!o.report.converged) return kError;
  return o.report.certified() ? kOk : kUncertified;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out, bool parallel, std::ostream& log) {
  if (report_invalid(cfg, log)) return kError;
  const ProblemSpec spec = build_problem(cfg.problem);
  const GridPtr grid = build_grid(cfg);
  SweepOptions opt;
  opt.parallel = parallel;
  opt.warm_start = !parallel;
  const auto outcomes = epsilon_sweep(cfg.epsilons, spec, grid, solver_config(cfg), opt);
  ensure_dir(out);

  std::vector<RunReport> reports;
  std::vector<TaggedDiagnostic> diags;
  std::vector<SweepProfile> stored;
  bool failed = false;
  for (const auto& o : outcomes) {
    write_outcome(o, cfg, spec, *grid, out);
    log_report(o.report, log);
    reports.push_back(o.report);
    const double eps = o.report.epsilon;
    if (!o.report.converged) {
      failed = true;
      continue;
    }
    // Diagnostics are recomputed from the written artifact, not from memory.
    Profile p = read_profile_csv(profile_path(out, eps), spec.dimension());
    diags.push_back({eps, check_geometry(spec, eps, p.grid, {}, cfg.seed)});
    for (auto& d : profile_diagnostics(p, spec, eps)) diags.push_back({eps, std::move(d)});
    stored.push_back({eps, std::move(p)});
  }
  if (stored.size() >= 2) diags.push_back({std::nullopt, check_ps_diagnostics(stored, spec)});

  const SweepTrends trends = sweep_trends(reports);
  write_text(out / "sweep_summary.json", sweep_summary_to_json(reports, trends, cfg));
  write_text(out / "diagnostics.json", diagnostics_to_json(diags));
  bool all_ok = true;
  for (const auto& d : diags) {
    if (!d.report.pass) {
      all_ok = false;
      fmt::print(log, "diagnostic {} failed{}: {}\n", d.report.name,
                 d.eps ? fmt::format(" at eps={}", *d.eps) : std::string(), d.report.worst_sample);
    }
  }
  fmt::print(log, "eps_hat: {}\n", trends.eps_hat ? fmt::format("{}", *trends.eps_hat) : "none");
  if (failed) return kError;
  return all_ok ? kOk : kUncertified;
}

int cmd_verify(const fs::path& profile, const std::optional<fs::path>& report,
               const std::optional<fs::path>& out, std::ostream& os, std::ostream& log) {
  if (!fs::exists(profile)) {
    fmt::print(log, "profile not found: {}\n", profile.string());
    return kError;
  }
  const std::optional<fs::path> rpath = report ? report : sibling_report(profile);
  if (!rpath) {
    fmt::print(log, "cannot locate the report for {}; pass --report\n", profile.string());
    return kError;
  }
  if (!fs::exists(*rpath)) {
    fmt::print(log, "report not found: {}\n", rpath->string());
    return kError;
  }
  const StoredReport stored = read_report(*rpath);
  const ProblemSpec spec = build_problem(stored.config.problem);
  const double eps = stored.report.epsilon;
  const Profile p = read_profile_csv(profile, spec.dimension());

  std::vector<TaggedDiagnostic> diags;
  diags.push_back({eps, check_geometry(spec, eps, p.grid, {}, stored.config.seed)});
  for (auto& d : profile_diagnostics(p, spec, eps)) diags.push_back({eps, std::move(d)});
  const std::string text = diagnostics_to_json(diags);
  os << text << '\n';
  if (out) {
    ensure_dir(*out);
    write_text(*out / "diagnostics.json", text);
  }
  bool ok = true;
  for (const auto& d : diags) {
    if (!d.report.pass) {
      ok = false;
      fmt::print(log, "diagnostic {} failed: {}\n", d.report.name, d.report.worst_sample);
    }
  }
  return ok ? kOk : kUncertified;
}

int cmd_classify(const RunConfig& cfg, std::ostream& os) {
  if (cfg.problem.nonlinearity != "power") {
    throw ValidationError(fmt::format("unsupported nonlinearity kind '{}'", cfg.problem.nonlinearity));
  }
  const GrowthReport g = classify_growth(power_nonlinearity(cfg.problem.p), cfg.problem.dimension);
  const std::string crit =
      std::isfinite(g.critical_exponent) ? fmt::format("{}", g.critical_exponent) : "inf";
  fmt::print(os, "{}, 22*={}\n", to_string(g.growth), crit);
  return g.growth == GrowthClass::inconclusive ? kError : kOk;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Radial quasilinear Schroedinger solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "output directory");

  auto* solve = app.add_subcommand("solve", "solve at one epsilon");
  double eps = 0.0;
  solve->add_option("--epsilon", eps, "epsilon (squared internally)")->required();
  auto* sweep = app.add_subcommand("sweep", "solve over the config's epsilon list");
  bool parallel = false;
  sweep->add_flag("--parallel", parallel, "run epsilons concurrently (disables warm start)");
  auto* verify = app.add_subcommand("verify", "run diagnostics on a stored profile");
  std::string profile;
  std::string report;
  verify->add_option("profile", profile, "profile CSV")->required();
  verify->add_option("--report", report, "report JSON (default: sibling report_eps<eps>.json)");
  auto* classify = app.add_subcommand("classify", "print the growth class of the nonlinearity");

  // Global options are accepted after the subcommand too.
  for (auto* sub : {solve, sweep, verify, classify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = read_config(config_path);
    } catch (const IoError& e) {
      fmt::print(std::cerr, "{}\n", e.what());
      return kUsage;
    }
  }
  if (seed) {
    cfg.seed = *seed;
    cfg.solver.seed = *seed;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  try {
    if (*solve) return cmd_solve(cfg, eps, cfg.output_dir, std::cerr);
    if (*sweep) return cmd_sweep(cfg, cfg.output_dir, parallel, std::cerr);
    if (*verify) {
      return cmd_verify(profile, report.empty() ? std::nullopt : std::optional<fs::path>(report),
                        out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir),
                        std::cout, std::cerr);
    }
    if (*classify) return cmd_classify(cfg, std::cout);
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kError;
  }
  return kUsage;
}

}  // namespace qsol::cli
