#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "qsol/io.hpp"

namespace qsol::cli {

// Exit codes. Malformed command lines and unreadable or malformed config
// files are usage errors; configs that parse but fail validation are errors.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kUncertified = 2;  // solve: converged, coincide false; verify/sweep: a check failed
inline constexpr int kUsage = 64;

/// Writes profile_eps<eps>.csv and report_eps<eps>.json into `out`.
int cmd_solve(const RunConfig& cfg, double eps, const std::filesystem::path& out,
              std::ostream& log);
/// Per-epsilon artifacts plus sweep_summary.json and diagnostics.json.
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out, bool parallel,
              std::ostream& log);
/// Diagnostics on a stored profile. The report defaults to the sibling
/// report_eps<eps>.json. Prints the diagnostics JSON; also writes
/// diagnostics.json into `out` when given.
int cmd_verify(const std::filesystem::path& profile,
               const std::optional<std::filesystem::path>& report,
               const std::optional<std::filesystem::path>& out, std::ostream& os,
               std::ostream& log);
/// Prints e.g. "supercritical, 22*=12".
int cmd_classify(const RunConfig& cfg, std::ostream& os);

/// Full command line: solve | sweep | verify | classify.
int run(int argc, const char* const* argv);

}  // namespace qsol::cli
