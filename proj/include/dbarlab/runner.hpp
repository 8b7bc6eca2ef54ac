#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbarlab/config.hpp"
#include "dbarlab/reports.hpp"

namespace dbarlab {

/// Process exit codes of `dbarlab run`.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitInvariant = 4 };

/// Potential of the "dbar-potential" generator (degree q - 1).
FormField make_potential(const DataSpec& spec, const Grid& grid);

/// Builds omega from the spec. dbar-potential data is dbar v on the interior
/// rows (zero on the box faces); v must vanish within 2 cells of every face,
/// else DataGenerationError.
FormField make_data(const DataSpec& spec, const Grid& grid);

struct RunResult {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::vector<Assertion> assertions;
    /// One-line summary.
    std::string summary;
    /// Extra output files (name -> content), written next to report.json.
    std::vector<std::pair<std::string, std::string>> files;
};

/// Runs the experiment in memory. Library errors propagate.
RunResult execute(const ExperimentConfig& cfg);

/// Checks of the invariant suite (small grids, a few seconds).
std::vector<Assertion> validation_suite(const ExperimentConfig& cfg, nlohmann::json& details);

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

/// Applies overrides (flag > config > default), runs, writes
/// <out_dir>/report.json plus CSVs atomically, prints the summary to `out`
/// and errors to `err`, and maps failures onto ExitCode.
int run_config(const nlohmann::json& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int run_config_file(const std::filesystem::path& path, const Overrides& ov, std::ostream& out, std::ostream& err);

}  // namespace dbarlab
