#include "qsol/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "qsol/errors.hpp"

namespace qsol {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw IoError(fmt::format("{}: expected an object", where));
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw IoError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <class T>
void read_key(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

// JSON has no NaN; the writer emits null and the reader maps it back.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j, const char* key) {
  const json& x = j.at(key);
  return x.is_null() ? NAN : x.get<double>();
}

json problem_json(const ProblemConfig& p) {
  return {{"dimension", p.dimension},
          {"radii", {{"R1", p.R1}, {"r1", p.r1}, {"r2", p.r2}, {"R2", p.R2}}},
          {"alpha", p.alpha},
          {"nonlinearity", {{"kind", p.nonlinearity}, {"p", p.p}}},
          {"k", p.k}};
}

json solver_json(const MountainPassConfig& s) {
  return {{"path_points", s.path_points},
          {"backtrack", s.backtrack},
          {"sufficient_decrease", s.sufficient_decrease},
          {"max_outer_iters", s.max_outer_iters},
          {"residual_tol", s.residual_tol},
          {"sphere_radius", s.sphere_radius},
          {"path_perturbation", s.path_perturbation},
          {"max_newton_iters", s.max_newton_iters},
          {"path_tol", s.path_tol},
          {"stall_window", s.stall_window},
          {"endpoint_t_max", s.endpoint_t_max},
          {"sup_cap", s.sup_cap}};
}

json config_json(const RunConfig& c) {
  return {{"problem", problem_json(c.problem)},
          {"grid", {{"r_max", c.grid.r_max}, {"nodes", c.grid.nodes}, {"grading", c.grid.grading}}},
          {"solver", solver_json(c.solver)},
          {"epsilons", c.epsilons},
          {"output_dir", c.output_dir},
          {"seed", c.seed}};
}

RunConfig config_from(const json& j) {
  RunConfig c;
  check_keys(j, {"problem", "grid", "solver", "epsilons", "output_dir", "seed"}, "config");
  if (j.contains("problem")) {
    const json& p = j.at("problem");
    check_keys(p, {"dimension", "radii", "alpha", "nonlinearity", "k"}, "problem");
    read_key(p, "dimension", c.problem.dimension, "problem");
    read_key(p, "alpha", c.problem.alpha, "problem");
    read_key(p, "k", c.problem.k, "problem");
    if (p.contains("radii")) {
      const json& r = p.at("radii");
      check_keys(r, {"R1", "r1", "r2", "R2"}, "problem.radii");
      read_key(r, "R1", c.problem.R1, "problem.radii");
      read_key(r, "r1", c.problem.r1, "problem.radii");
      read_key(r, "r2", c.problem.r2, "problem.radii");
      read_key(r, "R2", c.problem.R2, "problem.radii");
    }
    if (p.contains("nonlinearity")) {
      const json& n = p.at("nonlinearity");
      check_keys(n, {"kind", "p"}, "problem.nonlinearity");
      read_key(n, "kind", c.problem.nonlinearity, "problem.nonlinearity");
      read_key(n, "p", c.problem.p, "problem.nonlinearity");
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"r_max", "nodes", "grading"}, "grid");
    read_key(g, "r_max", c.grid.r_max, "grid");
    read_key(g, "nodes", c.grid.nodes, "grid");
    read_key(g, "grading", c.grid.grading, "grid");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    MountainPassConfig& m = c.solver;
    check_keys(s,
               {"path_points", "backtrack", "sufficient_decrease", "max_outer_iters", "residual_tol",
                "sphere_radius", "path_perturbation", "max_newton_iters", "path_tol",
                "stall_window", "endpoint_t_max", "sup_cap"},
               "solver");
    read_key(s, "path_points", m.path_points, "solver");
    read_key(s, "backtrack", m.backtrack, "solver");
    read_key(s, "sufficient_decrease", m.sufficient_decrease, "solver");
    read_key(s, "max_outer_iters", m.max_outer_iters, "solver");
    read_key(s, "residual_tol", m.residual_tol, "solver");
    read_key(s, "sphere_radius", m.sphere_radius, "solver");
    read_key(s, "path_perturbation", m.path_perturbation, "solver");
    read_key(s, "max_newton_iters", m.max_newton_iters, "solver");
    read_key(s, "path_tol", m.path_tol, "solver");
    read_key(s, "stall_window", m.stall_window, "solver");
    read_key(s, "endpoint_t_max", m.endpoint_t_max, "solver");
    read_key(s, "sup_cap", m.sup_cap, "solver");
  }
  read_key(j, "epsilons", c.epsilons, "config");
  read_key(j, "output_dir", c.output_dir, "config");
  read_key(j, "seed", c.seed, "config");
  c.solver.seed = c.seed;
  return c;
}

json parse(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(fmt::format("{}: {}", where, e.what()));
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json report_json(const RunReport& r) {
  return {{"epsilon", r.epsilon},
          {"seed", r.seed},
          {"c0_estimate", num(r.c0_estimate)},
          {"residual_norm", num(r.residual_norm)},
          {"max_f_on_lambda_bar", num(r.max_f_on_lambda_bar)},
          {"max_f_off_lambda_bar", num(r.max_f_off_lambda_bar)},
          {"a", num(r.a)},
          {"coincide", r.coincide},
          {"certified", r.certified()},
          {"j_residual_norm", num(r.j_residual_norm)},
          {"h1_norm_u", num(r.h1_norm_u)},
          {"x_norm_u", num(r.x_norm_u)},
          {"sup_u_lambda_bar", num(r.sup_u_lambda_bar)},
          {"energy_H", num(r.energy_H)},
          {"energy_J", num(r.energy_J)},
          {"minimax_iterations", r.minimax_iterations},
          {"newton_steps", r.newton_steps},
          {"flow_steps", r.flow_steps},
          {"converged", r.converged},
          {"warnings", r.warnings},
          {"error", r.error}};
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace

RunConfig config_from_json(const std::string& text) { return config_from(parse(text, "config")); }

std::string config_to_json(const RunConfig& cfg) { return dump(config_json(cfg)); }

RunConfig read_config(const fs::path& path) {
  try {
    return config_from(parse(slurp(path), path.string()));
  } catch (const IoError& e) {
    const std::string what = e.what();
    if (what.starts_with(path.string())) throw;
    throw IoError(fmt::format("{}: {}", path.string(), what));
  }
}

void write_config(const fs::path& path, const RunConfig& cfg) { write_text(path, config_to_json(cfg)); }

ProblemSpec build_problem(const ProblemConfig& c) {
  if (c.nonlinearity != "power") {
    throw ValidationError(
        fmt::format("nonlinearity kind '{}' is not supported (expected 'power')", c.nonlinearity));
  }
  return ProblemSpec(c.dimension, build_tent_potential(c.R1, c.r1, c.r2, c.R2, c.alpha),
                     power_nonlinearity(c.p), c.k);
}

GridPtr build_grid(const RunConfig& cfg) {
  return RadialGrid::build(cfg.problem.dimension, cfg.grid.r_max, cfg.grid.nodes, cfg.grid.grading);
}

MountainPassConfig solver_config(const RunConfig& cfg) {
  MountainPassConfig m = cfg.solver;
  m.seed = cfg.seed;
  return m;
}

std::vector<DiagnosticReport> validate_config(const RunConfig& cfg) {
  std::vector<DiagnosticReport> failed;
  auto fail = [&](std::string name, std::string why) {
    DiagnosticReport d;
    d.name = std::move(name);
    d.pass = false;
    d.worst_sample = std::move(why);
    failed.push_back(std::move(d));
  };
  try {
    const Potential V = build_tent_potential(cfg.problem.R1, cfg.problem.r1, cfg.problem.r2,
                                             cfg.problem.R2, cfg.problem.alpha);
    if (cfg.problem.nonlinearity != "power") {
      fail("nonlinearity", fmt::format("unsupported kind '{}'", cfg.problem.nonlinearity));
      return failed;
    }
    const Nonlinearity g = power_nonlinearity(cfg.problem.p);
    for (auto& r : verify_hypotheses(V, g, cfg.problem.k)) {
      if (!r.pass) failed.push_back(std::move(r));
    }
    if (cfg.problem.dimension < 2) fail("dimension", "dimension must be >= 2");
  } catch (const std::exception& e) {
    fail("problem", e.what());
  }
  try {
    build_grid(cfg);
  } catch (const std::exception& e) {
    fail("grid", e.what());
  }
  try {
    solver_config(cfg).validate();
  } catch (const std::exception& e) {
    fail("solver", e.what());
  }
  if (cfg.epsilons.empty()) fail("epsilons", "epsilon list is empty");
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0.0) || !std::isfinite(cfg.epsilons[i])) {
      fail("epsilons", fmt::format("epsilon {} is not a positive number", cfg.epsilons[i]));
    } else if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1])) {
      fail("epsilons", "epsilon list must be strictly decreasing");
    }
  }
  return failed;
}

std::string eps_label(double eps) { return fmt::format("{}", eps); }

fs::path profile_path(const fs::path& dir, double eps) {
  return dir / fmt::format("profile_eps{}.csv", eps_label(eps));
}

fs::path report_path(const fs::path& dir, double eps) {
  return dir / fmt::format("report_eps{}.json", eps_label(eps));
}

void write_profile_csv(const fs::path& path, const Profile& p) {
  const auto r = p.grid->nodes();
  std::string out = "r,v,u,V\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out += fmt::format("{:.12g},{:.12g},{:.12g},{:.12g}\n", r[i], p.v[i], p.u[i], p.V[i]);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  f << out;
}

Profile read_profile_csv(const fs::path& path, int dimension) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != "r,v,u,V") {
    throw IoError(fmt::format("{}: expected header 'r,v,u,V'", path.string()));
  }
  std::vector<double> r;
  Profile p;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double vals[4];
    const char* pos = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 4; ++c) {
      const auto res = std::from_chars(pos, end, vals[c]);
      if (res.ec != std::errc{} || (c < 3 && (res.ptr == end || *res.ptr != ',')) ||
          (c == 3 && res.ptr != end)) {
        throw IoError(fmt::format("{}:{}: malformed row", path.string(), lineno));
      }
      pos = res.ptr + 1;
    }
    r.push_back(vals[0]);
    p.v.push_back(vals[1]);
    p.u.push_back(vals[2]);
    p.V.push_back(vals[3]);
  }
  try {
    p.grid = RadialGrid::from_nodes(dimension, std::move(r));
  } catch (const std::exception& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return p;
}

void write_failure_csv(const fs::path& path, const RadialGrid& grid,
                       const std::vector<double>& state) {
  const auto r = grid.nodes();
  std::string out = "r,v\n";
  for (std::size_t i = 0; i < r.size() && i < state.size(); ++i) {
    out += fmt::format("{:.12g},{:.12g}\n", r[i], state[i]);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  f << out;
}

std::string report_to_json(const RunReport& report, const RunConfig& cfg) {
  json j = report_json(report);
  j["config"] = config_json(cfg);
  return dump(j);
}

StoredReport read_report(const fs::path& path) {
  const json j = parse(slurp(path), path.string());
  StoredReport s;
  try {
    RunReport& r = s.report;
    r.epsilon = j.at("epsilon").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.c0_estimate = get_num(j, "c0_estimate");
    r.residual_norm = get_num(j, "residual_norm");
    r.max_f_on_lambda_bar = get_num(j, "max_f_on_lambda_bar");
    r.max_f_off_lambda_bar = get_num(j, "max_f_off_lambda_bar");
    r.a = get_num(j, "a");
    r.coincide = j.at("coincide").get<bool>();
    r.j_residual_norm = get_num(j, "j_residual_norm");
    r.h1_norm_u = get_num(j, "h1_norm_u");
    r.x_norm_u = get_num(j, "x_norm_u");
    r.sup_u_lambda_bar = get_num(j, "sup_u_lambda_bar");
    r.energy_H = get_num(j, "energy_H");
    r.energy_J = get_num(j, "energy_J");
    r.minimax_iterations = j.at("minimax_iterations").get<int>();
    r.newton_steps = j.at("newton_steps").get<int>();
    r.flow_steps = j.at("flow_steps").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.error = j.at("error").get<std::string>();
    s.config = config_from(j.at("config"));
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return s;
}

std::string diagnostics_to_json(const std::vector<TaggedDiagnostic>& diags) {
  json arr = json::array();
  for (const auto& d : diags) {
    const DiagnosticReport& r = d.report;
    arr.push_back({{"name", r.name},
                   {"epsilon", d.eps ? json(*d.eps) : json(nullptr)},
                   {"pass", r.pass},
                   {"worst_sample", r.worst_sample},
                   {"worst_location", num(r.worst_location)},
                   {"worst_value", num(r.worst_value)},
                   {"tolerance", num(r.tolerance)}});
  }
  return dump(arr);
}

std::string sweep_summary_to_json(const std::vector<RunReport>& reports, const SweepTrends& t,
                                  const RunConfig& cfg) {
  json runs = json::array();
  for (const auto& r : reports) {
    runs.push_back({{"epsilon", r.epsilon},
                    {"converged", r.converged},
                    {"coincide", r.coincide},
                    {"certified", r.certified()},
                    {"c0_estimate", num(r.c0_estimate)},
                    {"residual_norm", num(r.residual_norm)},
                    {"j_residual_norm", num(r.j_residual_norm)},
                    {"h1_norm_u", num(r.h1_norm_u)},
                    {"sup_u_lambda_bar", num(r.sup_u_lambda_bar)},
                    {"max_f_on_lambda_bar", num(r.max_f_on_lambda_bar)},
                    {"max_f_off_lambda_bar", num(r.max_f_off_lambda_bar)},
                    {"error", r.error}});
  }
  json trends = {{"eps_hat", t.eps_hat ? json(*t.eps_hat) : json(nullptr)},
                 {"coincidence_monotone", t.coincidence_monotone},
                 {"h1_nonincreasing", t.h1_nonincreasing},
                 {"h1_halved", t.h1_halved},
                 {"sup_nonincreasing", t.sup_nonincreasing},
                 {"tolerance", t.tolerance},
                 {"j_residual_limit", t.j_residual_limit}};
  return dump({{"runs", runs}, {"trends", trends}, {"config", config_json(cfg)}});
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  f << text << '\n';
}

}  // namespace qsol
