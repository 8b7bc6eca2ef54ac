#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbarlab/dbar.hpp"
#include "dbarlab/diagnostics.hpp"
#include "dbarlab/form_field.hpp"
#include "dbarlab/measure.hpp"
#include "dbarlab/weights.hpp"

namespace dbarlab {

struct SolveConfig {
    /// Relative residual ||dbar u - omega||_{w_d} / ||omega||_{w_d}.
    double tolerance = 1e-10;
    /// 0 selects 20 sqrt(unknowns).
    long max_iterations = 0;
    /// Tikhonov shift mu >= 0 added to the dual operator.
    double shift = 0.0;
    int verbosity = 0;
    /// Skip the closedness / orthogonality prechecks (the caller vouches for
    /// the data, or wants the least-squares behaviour on purpose).
    bool trust_data = false;
    /// Return the best iterate instead of throwing when the tolerance is missed.
    bool allow_inexact = false;
    /// > 0 floors w_u at this value (stress testing of degenerate weights).
    double weight_floor = 0.0;
    /// Highest monomial degree in the q = n orthogonality precheck.
    int orthogonality_degree = 6;
    /// The residual weight w_d is capped at e^{cap} times its largest value on
    /// the data rows. Bumped weights change by factors like e^{1000} between
    /// neighbouring cells on desk-scale grids, where an uncapped w_d residual
    /// only measures rounding in the pinned far field.
    double residual_weight_cap = 30.0;

    /// Throws ConfigError for out-of-range values.
    void validate() const;
};

struct SolveReport {
    long iterations = 0;
    double residual = 0.0;
    double u_norm = 0.0;
    double data_norm = 0.0;
    double ratio = 0.0;
    std::optional<double> k;
    bool converged = true;
    /// Closedness ratio (q < n) or moment defect (q = n); -1 when skipped.
    double precheck = -1.0;
    std::size_t unknowns = 0;
    std::size_t constraints = 0;
    std::vector<double> residual_history;
};

struct SolveResult {
    FormField u;
    SolveReport report;
};

/// Optional restriction of the problem to a sub-grid. Unknowns outside
/// `unknowns` are pinned to zero; constraints are imposed on `rows` (default:
/// the stencil-closed interior of `unknowns`).
struct SolveDomain {
    std::optional<RegionMask> unknowns;
    std::optional<RegionMask> rows;
};

/// Minimal ||u||_{w_u} solution of dbar u = omega on the constraint rows, via
/// preconditioned CG on the dual system (D W_u^{-1} D^H + mu) lambda = omega,
/// u = W_u^{-1} D^H lambda. The iterate with the smallest true residual is
/// kept, which guards against rounding drift on rank-deficient systems.
SolveResult solve_min_norm(const FormField& omega, const DbarOperator& op, const WeightedMeasure& w_u,
                           const WeightedMeasure& w_d, const SolveConfig& cfg = {},
                           const SolveDomain& domain = {});

struct BumpedMember {
    double k = 0.0;
    FormField u;
    SolveReport report;
    /// int_{rho >= eps} |u_k|^2 c_phi e^phi.
    double tail = 0.0;
    /// int |u_k|^2 c_phi e^phi over the whole box.
    double mass = 0.0;
};

/// Solves dbar u_k = omega with w_u = c_phi e^{psi_k}, w_d = e^{psi_k} for
/// each k. Independent solves run on `threads` workers; the result order
/// follows ks.
std::vector<BumpedMember> solve_bumped_family(const FormField& omega, const DefiningFunction& domain, double eps,
                                              const std::vector<double>& ks, const WeightSpec& phi,
                                              const SolveConfig& cfg = {}, int threads = 1,
                                              const ConvexCutoff& cutoff = {});

struct ConstantCase {
    FormField omega;
    WeightedMeasure w_u;
    WeightedMeasure w_d;
};

struct ConstantEstimate {
    double c_hat = 0.0;
    std::vector<SolveReport> reports;
};

/// C_hat = max over cases of the solution/data norm ratio.
ConstantEstimate estimate_constant(const std::vector<ConstantCase>& cases, const SolveConfig& cfg = {},
                                   int threads = 1);

/// Runs f(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown in index order after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f);

}  // namespace dbarlab
