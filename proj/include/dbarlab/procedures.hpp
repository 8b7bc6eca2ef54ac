#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dbarlab/solver.hpp"

namespace dbarlab {

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0, 1]; max slope 15/8.
double smoothstep5(double t) noexcept;

/// Radial cutoff: 1 for |z - c| <= inner, 0 for |z - c| >= outer, quintic in
/// between. Sampled at every grid point.
std::vector<double> radial_cutoff(const Grid& grid, const CPoint& center, double inner, double outer);

// ---------------------------------------------------------------------------
// Compact support by weight bumping.

struct DecayRow {
    double k = 0.0;
    double tail = 0.0;
    double ratio = 0.0;
    double mass = 0.0;
    double bound_prediction = 0.0;
    long iterations = 0;
    double residual = 0.0;
};

struct DecayReport {
    double eps = 0.0;
    double chi_eps = 0.0;
    std::vector<DecayRow> rows;
    /// Least-squares slope / intercept of log(tail) against k over tails > 1e-14.
    std::optional<double> slope;
    std::optional<double> intercept;
    int fit_points = 0;
    double slope_target = 0.0;
    /// tail / mass at the largest k.
    double support_fraction = 0.0;
    /// max_k ratio_k / ratio_0.
    double ratio_spread = 0.0;
    /// max_k ratio_k, used as C_hat in the bound predictions.
    double c_hat = 0.0;
    double omega_norm = 0.0;
    bool trivial = false;
};

/// Tail floor below which points are dropped from the decay fit.
inline constexpr double kTailFloor = 1e-14;

/// Runs the bumped family and fits the exponential tail decay. Throws
/// DegenerateFitError when fewer than 3 tails exceed the floor (unless omega
/// vanishes, which is reported as trivial input).
DecayReport compact_support_experiment(const FormField& omega, const DefiningFunction& domain, double eps,
                                       const std::vector<double>& ks, const WeightSpec& phi,
                                       const SolveConfig& cfg = {}, int threads = 1,
                                       const ConvexCutoff& cutoff = {});

// ---------------------------------------------------------------------------
// Support avoidance (n = 2, q = 2).

struct AvoidanceOptions {
    /// Ball used for the compact-support solve of step 1 (must contain supp omega).
    DefiningFunction domain;
    double eps = 1.0;
    double k = 12.0;
    ConvexCutoff cutoff{};
    /// Closedness of v on C required by step 2 (relative to ||omega||).
    double closed_tol = 1e-7;
    /// CG tolerance of the inner solve dbar h = v on C.
    double h_tolerance = 1e-12;
    /// Cell margins demanded between supp omega, U, C and the box.
    int margin_cells = 3;
};

struct AvoidanceReport {
    double max_u_on_U = 0.0;
    double max_v = 0.0;
    double max_v_on_U = 0.0;
    /// max_u_on_U / max_v.
    double relative_u_on_U = 0.0;
    /// ||dbar u - omega|| / ||omega|| over the interior rows, e^phi weighted.
    double residual = 0.0;
    /// Step 1 residual as reported by the solver.
    double v_residual = 0.0;
    /// ||dbar v|| on the rows inside C, relative to ||omega|| (unweighted).
    double closed_on_C = 0.0;
    double h_residual = 0.0;
    long h_iterations = 0;
    double v_norm = 0.0;
    double h_norm = 0.0;
    double u_norm = 0.0;
    /// max |u_A - u_B| / max|v| between u_A = v - dbar(chi h) and
    /// u_B = v - chi v - (dbar chi ^ h), the latter with the discrete
    /// product-rule remainder dbar(chi h) - chi dbar h.
    double assembly_defect = 0.0;
    /// max |chi (v - dbar h)| / max|v|, which the assembly defect equals.
    double chi_h_defect = 0.0;
    double chi_inner = 0.0;
    double chi_outer = 0.0;
    bool trivial = false;
};

struct AvoidanceResult {
    FormField u;
    AvoidanceReport report;
};

/// u := v - dbar(chi h) with dbar v = omega (weight bumping), dbar h = v on C
/// and chi = 1 on U, 0 near the boundary of C. Geometry violations throw
/// PreconditionError; failures inside a step throw SolverError naming it.
AvoidanceResult support_avoidance(const FormField& omega, const DefiningFunction& C, const DefiningFunction& U,
                                  const WeightSpec& phi, const AvoidanceOptions& opts, const SolveConfig& cfg = {});

// ---------------------------------------------------------------------------
// Approximation procedure.

struct ApproxOptions {
    int stages = 8;
    /// Override of r_0 (default: smallest radius with tail <= 1).
    std::optional<double> r0;
    int duality_tests = 20;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Bump used by the compact-support correction solves (q < n only).
    double correction_k = 12.0;
    double correction_eps = 1.0;
};

struct ApproxStage {
    int k = 0;
    double r_k = 0.0;
    /// int_{|z| >= r_k} |omega|^2 e^phi.
    double tail_omega = 0.0;
    /// int_{B_k \ B_{k-1}} |omega|^2 e^phi.
    double shell_mass = 0.0;
    double dbar_omega_k_norm = 0.0;
    double u_k_norm = 0.0;
    /// ||omega - mu_k||_{e^phi}.
    double mu_gap = 0.0;
    /// ||omega - omega_k||_{e^phi}.
    double omega_gap = 0.0;
    double v_k_norm = 0.0;
    double v_k_residual = 0.0;
    long v_k_iterations = 0;
    double cutoff_max_dbar = 0.0;
    /// Moment defect of mu_k (q = n), -1 otherwise.
    double mu_moment_defect = -1.0;
};

struct ApproxReport {
    std::vector<ApproxStage> stages;
    double r0 = 0.0;
    /// Largest ratio over the correction solves (0 when there are none).
    double c_hat = 0.0;
    int correction_solves = 0;
    /// max over random test forms t of
    /// |B(v, dbar t) - (-1)^q B(omega, t)| / (||v|| ||dbar t|| + ||omega|| ||t||).
    double duality_residual = 0.0;
    std::vector<double> duality_samples;
};

struct ApproxResult {
    FormField v;
    ApproxReport report;
};

/// Exhausts omega by balls B_k, corrects chi_k omega to a closed form mu_k and
/// solves dbar v_k = mu_k; returns v = v_K.
ApproxResult approximation_procedure(const FormField& omega, const WeightSpec& phi, const ApproxOptions& opts = {},
                                     const SolveConfig& cfg = {});

}  // namespace dbarlab
