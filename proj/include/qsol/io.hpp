#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsol/analysis.hpp"
#include "qsol/mountain_pass.hpp"

namespace qsol {

/// Raised for unreadable or malformed artifacts and configs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  int dimension = 3;
  double R1 = 1.0;
  double r1 = 2.0;
  double r2 = 3.0;
  double R2 = 4.0;
  double alpha = 1.0;
  std::string nonlinearity = "power";  // only pure powers t^p are serializable
  double p = 13.0;
  double k = 4.0;
};

struct GridConfig {
  double r_max = 16.0;
  int nodes = 1024;  // number of cells M
  double grading = 1.0;
};

/// One file fully determines a run. solver.seed is ignored in favour of the
/// top-level seed.
struct RunConfig {
  ProblemConfig problem;
  GridConfig grid;
  MountainPassConfig solver;
  std::vector<double> epsilons{1.0, 0.5, 0.25, 0.1, 0.05};
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

/// Unknown keys and wrong types throw IoError; missing keys keep defaults.
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);
RunConfig read_config(const std::filesystem::path& path);
void write_config(const std::filesystem::path& path, const RunConfig& cfg);

/// Semantic checks (ValidationError / DomainError propagate).
ProblemSpec build_problem(const ProblemConfig& cfg);
GridPtr build_grid(const RunConfig& cfg);
MountainPassConfig solver_config(const RunConfig& cfg);
/// Runs every hypothesis check and solver validator; returns the failing
/// reports (empty when the config is admissible).
std::vector<DiagnosticReport> validate_config(const RunConfig& cfg);

/// "0.1" style label used in artifact names.
std::string eps_label(double eps);
std::filesystem::path profile_path(const std::filesystem::path& dir, double eps);
std::filesystem::path report_path(const std::filesystem::path& dir, double eps);

/// Columns r,v,u,V with 12 significant digits.
void write_profile_csv(const std::filesystem::path& path, const Profile& p);
Profile read_profile_csv(const std::filesystem::path& path, int dimension);
/// Iterate dumped when a solve fails: columns r,v.
void write_failure_csv(const std::filesystem::path& path, const RadialGrid& grid,
                       const std::vector<double>& state);

std::string report_to_json(const RunReport& report, const RunConfig& cfg);
struct StoredReport {
  RunReport report;
  RunConfig config;
};
StoredReport read_report(const std::filesystem::path& path);

/// Diagnostics tagged with the epsilon they were computed at (nullopt for
/// sweep-wide checks).
struct TaggedDiagnostic {
  std::optional<double> eps;
  DiagnosticReport report;
};
std::string diagnostics_to_json(const std::vector<TaggedDiagnostic>& diags);

std::string sweep_summary_to_json(const std::vector<RunReport>& reports, const SweepTrends& trends,
                                  const RunConfig& cfg);

/// Writes `text` followed by a newline.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qsol
