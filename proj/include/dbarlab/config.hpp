#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbarlab/solver.hpp"

namespace dbarlab {

enum class ExperimentKind { solve, decay, avoid, approx, constants, validate };

std::string to_string(ExperimentKind kind);

struct BallSpec {
    CPoint center{};
    double radius = 1.0;

    DefiningFunction defining(int n) const { return DefiningFunction{n, center, radius}; }
};

/// Data generators:
///  - "dbar-potential": omega = dbar v on the interior rows, v a bump
///    g(z) = amplitude e^{-gauss |z-c|^2} (1 - S((|z-c| - inner) / (outer - inner)))
///    times fixed polynomial factors per component;
///  - "gaussian-envelope": every component equals amplitude e^{-gauss |z-c|^2};
///  - "zero".
struct DataSpec {
    std::string kind = "dbar-potential";
    int degree = 1;
    CPoint center{};
    double inner = 0.0;
    double outer = 1.0;
    double gauss = 0.0;
    double amplitude = 1.0;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::solve;
    std::string name;
    int n = 1;
    double R = 1.0;
    int N = 16;
    std::string weight_kind = "gaussian";
    std::vector<double> weight_params{1.0};
    DataSpec data;

    std::optional<BallSpec> D, C, U;
    double eps = 1.0;
    double cutoff_scale = 1.0;
    std::vector<double> ks;
    double k = 12.0;
    int stages = 8;
    std::optional<double> r0;
    int duality_tests = 20;

    SolveConfig solver;
    /// Solver settings for the inner solves of avoid (step 3) and approx (corrections).
    double inner_tolerance = 1e-12;

    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 1;

    Grid grid() const { return Grid(n, R, N); }
    WeightSpec weight() const { return WeightSpec::from_name(weight_kind, n, weight_params); }
    /// Normalized echo of every setting, written into reports.
    nlohmann::json to_json() const;
};

/// Parses and validates. Throws ConfigError naming the offending key path
/// (e.g. "grid.N") for missing, mistyped, unknown or out-of-range keys.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Reads a .json or .toml file into JSON (TOML tables become objects).
nlohmann::json read_config_file(const std::filesystem::path& path);
nlohmann::json parse_toml(const std::string& text, const std::string& source = "<string>");

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dbarlab
