#include "dbarlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include "dbarlab/errors.hpp"
#include "dbarlab/field_io.hpp"
#include "dbarlab/oracle.hpp"
#include "dbarlab/presets.hpp"

namespace dbarlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double dist(const CPoint& a, const CPoint& b, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

double bump_profile(const DataSpec& s, double d) {
    const double cut = 1.0 - smoothstep5((d - s.inner) / (s.outer - s.inner));
    return cut == 0.0 ? 0.0 : s.amplitude * std::exp(-s.gauss * d * d) * cut;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(3);
    o << v;
    return o.str();
}

bool all_passed(const std::vector<Assertion>& as) {
    for (const Assertion& a : as) {
        if (!a.passed) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

RunResult run_solve(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid();
    const WeightSpec phi = cfg.weight();
    const FormField omega = make_data(cfg.data, g);
    const DbarOperator op(g, cfg.data.degree);
    const SolveResult s = solve_min_norm(omega, op, c_exp_weight(g, phi), exp_weight(g, phi), cfg.solver);

    RunResult r;
    r.report["solve"] = to_json(s.report);
    r.assertions.push_back(check_at_most("residual", s.report.residual, cfg.solver.tolerance));
    r.assertions.push_back(check_true("ratio finite", std::isfinite(s.report.ratio)));
    if (cfg.data.degree == g.n()) {
        const double defect = omega.is_zero() ? 0.0 : max_moment_defect(moment_orthogonality(omega, 6));
        r.report["moment_defect"] = defect;
        r.assertions.push_back(check_at_most("moment defect of omega (m <= 6)", defect, 1e-9));
    } else {
        r.assertions.push_back(check_at_most("closedness of omega", std::max(s.report.precheck, 0.0), 1e-8));
    }
    r.files.emplace_back("u.bin", field_to_blob(s.u));
    r.summary = "iterations " + std::to_string(s.report.iterations) + ", residual " + fmt(s.report.residual) +
                ", ratio " + fmt(s.report.ratio);
    return r;
}

RunResult run_decay(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid();
    const FormField omega = make_data(cfg.data, g);
    const DecayReport d = compact_support_experiment(omega, cfg.D->defining(cfg.n), cfg.eps, cfg.ks, cfg.weight(),
                                                     cfg.solver, cfg.threads, ConvexCutoff{cfg.cutoff_scale});
    RunResult r;
    r.report["decay"] = to_json(d);
    r.files.emplace_back("decay.csv", decay_csv(d));
    if (d.trivial) {
        r.assertions.push_back(check_true("trivial input has zero tails", true));
        r.summary = "trivial input (omega = 0)";
        return r;
    }
    r.assertions.push_back(check_at_most("fitted slope", *d.slope, 0.8 * d.slope_target));
    r.assertions.push_back(check_at_most("support fraction at largest k", d.support_fraction, 1e-6));
    r.assertions.push_back(check_at_most("ratio spread over k", d.ratio_spread, 1.10));
    bool decreasing = true;
    double worst = 0.0;
    const DecayRow& first = d.rows.front();
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        if (i > 0 && d.rows[i].k > d.rows[i - 1].k && !(d.rows[i].tail <= d.rows[i - 1].tail)) decreasing = false;
        const double bound = first.tail * std::exp(-0.8 * (d.rows[i].k - first.k) * d.chi_eps);
        if (bound > 0.0) worst = std::max(worst, d.rows[i].tail / bound);
    }
    r.assertions.push_back(check_true("tails decrease in k", decreasing));
    r.assertions.push_back(check_at_most("tail_k / (tail_0 exp(-0.8 k chi(eps)))", worst, 1.0));
    r.summary = "slope " + fmt(*d.slope) + " (target " + fmt(d.slope_target) + "), support fraction " +
                fmt(d.support_fraction) + ", ratio spread " + fmt(d.ratio_spread);
    return r;
}

RunResult run_constants(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid();
    const FormField omega = make_data(cfg.data, g);
    const auto fam = solve_bumped_family(omega, cfg.D->defining(cfg.n), cfg.eps, cfg.ks, cfg.weight(), cfg.solver,
                                         cfg.threads, ConvexCutoff{cfg.cutoff_scale});
    RunResult r;
    json members = json::array();
    std::string csv = "k,ratio,tail,iterations,residual\n";
    double c_hat = 0.0;
    double ratio0 = fam.front().report.ratio;
    double k0 = fam.front().k;
    for (const BumpedMember& m : fam) {
        json j = to_json(m.report);
        j["tail"] = m.tail;
        members.push_back(j);
        c_hat = std::max(c_hat, m.report.ratio);
        if (m.k < k0) {
            k0 = m.k;
            ratio0 = m.report.ratio;
        }
        csv += format_double(m.k) + "," + format_double(m.report.ratio) + "," + format_double(m.tail) + "," +
               std::to_string(m.report.iterations) + "," + format_double(m.report.residual) + "\n";
    }
    const double spread = ratio0 > 0.0 ? c_hat / ratio0 : 0.0;
    r.report["constants"] = {{"members", members}, {"c_hat", c_hat}, {"ratio_spread", spread}};
    r.files.emplace_back("constants.csv", csv);
    r.assertions.push_back(check_at_most("max_k ratio / ratio at smallest k", spread, 1.10));
    r.summary = "C_hat " + fmt(c_hat) + ", spread " + fmt(spread);
    return r;
}

RunResult run_avoid(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid();
    const FormField omega = make_data(cfg.data, g);
    AvoidanceOptions opts;
    opts.domain = cfg.D->defining(2);
    opts.eps = cfg.eps;
    opts.k = cfg.k;
    opts.cutoff = ConvexCutoff{cfg.cutoff_scale};
    opts.h_tolerance = cfg.inner_tolerance;
    const AvoidanceResult a =
        support_avoidance(omega, cfg.C->defining(2), cfg.U->defining(2), cfg.weight(), opts, cfg.solver);
    RunResult r;
    r.report["avoidance"] = to_json(a.report);
    r.assertions.push_back(check_at_most("max|u| on closure(U) / max|v|", a.report.relative_u_on_U, 1e-10));
    r.assertions.push_back(check_at_most("relative residual of dbar u = omega", a.report.residual, 1e-7));
    r.assertions.push_back(check_at_most("v - chi v - dbar chi ^ h expansion defect", a.report.assembly_defect, 1e-12));
    r.summary = "max|u| on U / max|v| " + fmt(a.report.relative_u_on_U) + ", residual " + fmt(a.report.residual);
    return r;
}

RunResult run_approx(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid();
    const FormField omega = make_data(cfg.data, g);
    ApproxOptions opts;
    opts.stages = cfg.stages;
    opts.r0 = cfg.r0;
    opts.duality_tests = cfg.duality_tests;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    opts.correction_k = cfg.k;
    opts.correction_eps = cfg.eps;
    const ApproxResult a = approximation_procedure(omega, cfg.weight(), opts, cfg.solver);
    const ApproxReport& rep = a.report;
    RunResult r;
    r.report["approx"] = to_json(rep);
    r.files.emplace_back("approx.csv", approx_csv(rep));

    double worst_gap = 0.0, worst_cut = 0.0, worst_tele = 0.0, worst_shell = 0.0;
    bool spaced = rep.stages.front().r_k >= rep.r0 + 1.0;
    for (std::size_t i = 0; i < rep.stages.size(); ++i) {
        const ApproxStage& s = rep.stages[i];
        if (s.k >= 2) worst_gap = std::max(worst_gap, s.mu_gap * s.k / (1.0 + rep.c_hat));
        worst_cut = std::max(worst_cut, s.cutoff_max_dbar);
        const double tele = s.omega_gap + s.u_k_norm;
        if (tele > 0.0) worst_tele = std::max(worst_tele, s.mu_gap / tele);
        if (s.shell_mass > 0.0) worst_shell = std::max(worst_shell, s.dbar_omega_k_norm * s.dbar_omega_k_norm / s.shell_mass);
        if (i > 0 && s.r_k < rep.stages[i - 1].r_k + 1.0) spaced = false;
    }
    r.assertions.push_back(check_at_most("max_k k ||omega - mu_k|| / (1 + C_hat)", worst_gap, 1.0));
    r.assertions.push_back(check_at_most("max |dbar chi_k|", worst_cut, 1.0 + 1e-3));
    r.assertions.push_back(check_at_most("duality residual", rep.duality_residual, 1e-6));
    r.assertions.push_back(check_at_most("||omega - mu_k|| / (||omega - omega_k|| + ||u_k||)", worst_tele, 1.0 + 1e-12));
    r.assertions.push_back(check_at_most("||dbar omega_k||^2 / shell mass", worst_shell, 1.0));
    r.assertions.push_back(check_true("r_k >= r_{k-1} + 1", spaced));
    r.summary = "stages " + std::to_string(rep.stages.size()) + ", final gap " + fmt(rep.stages.back().mu_gap) +
                ", duality residual " + fmt(rep.duality_residual);
    return r;
}

RunResult run_validate(const ExperimentConfig& cfg) {
    RunResult r;
    json details;
    r.assertions = validation_suite(cfg, details);
    r.report["validate"] = details;
    std::size_t passed = 0;
    for (const Assertion& a : r.assertions) passed += a.passed;
    r.summary = std::to_string(passed) + "/" + std::to_string(r.assertions.size()) + " checks passed";
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

FormField make_potential(const DataSpec& spec, const Grid& g) {
    const int n = g.n();
    const int deg = spec.degree - 1;
    return FormField::from_function(g, deg, [&](int c, const CPoint& z) -> cplx {
        const double b = bump_profile(spec, dist(z, spec.center, n));
        if (b == 0.0) return {};
        if (deg == 1 && n == 2) return c == 0 ? b * z[1] : -b * std::conj(z[0]);
        return b;
    });
}

FormField make_data(const DataSpec& spec, const Grid& g) {
    if (spec.degree < 1 || spec.degree > g.n()) throw ConfigError("data: degree must lie in [1, n]");
    if (spec.kind == "zero") return FormField(g, spec.degree);
    if (spec.kind == "gaussian-envelope") {
        return FormField::from_function(g, spec.degree, [&](int, const CPoint& z) {
            const double d = dist(z, spec.center, g.n());
            return cplx(spec.amplitude * std::exp(-spec.gauss * d * d));
        });
    }
    if (spec.kind != "dbar-potential") throw ConfigError("data: unknown kind '" + spec.kind + "'");
    const FormField v = make_potential(spec, g);
    FormField omega = exact_form_data(v, DbarOperator(g, spec.degree), 2);
    for (std::size_t p = 0; p < g.points(); ++p) {
        if (g.interior(p, 1)) continue;
        for (int c = 0; c < omega.components(); ++c) omega.at(c, p) = {};
    }
    return omega;
}

RunResult execute(const ExperimentConfig& cfg) {
    RunResult r;
    switch (cfg.kind) {
        case ExperimentKind::solve: r = run_solve(cfg); break;
        case ExperimentKind::decay: r = run_decay(cfg); break;
        case ExperimentKind::constants: r = run_constants(cfg); break;
        case ExperimentKind::avoid: r = run_avoid(cfg); break;
        case ExperimentKind::approx: r = run_approx(cfg); break;
        case ExperimentKind::validate: r = run_validate(cfg); break;
    }
    json head;
    head["schema_version"] = kSchemaVersion;
    head["experiment"] = to_string(cfg.kind);
    head["name"] = cfg.name;
    head["theorem"] = theorem_label(to_string(cfg.kind), cfg.n);
    head["config"] = cfg.to_json();
    json as = json::array();
    for (const Assertion& a : r.assertions) as.push_back(to_json(a));
    head["assertions"] = as;
    const bool ok = all_passed(r.assertions);
    head["passed"] = ok;
    head["status"] = ok ? "ok" : "invariant-violation";
    head.update(r.report);
    r.report = std::move(head);
    r.exit_code = ok ? kExitOk : kExitInvariant;
    return r;
}

// ---------------------------------------------------------------------------

std::vector<Assertion> validation_suite(const ExperimentConfig& cfg, json& details) {
    std::vector<Assertion> out;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_field = [&](const Grid& g, int deg, int margin) {
        FormField f(g, deg);
        for (int c = 0; c < f.components(); ++c) {
            for (std::size_t p = 0; p < g.points(); ++p) {
                if (g.cells_to_boundary(p) >= margin) f.at(c, p) = cplx(gauss(rng), gauss(rng));
            }
        }
        return f;
    };

    // dbar o dbar = 0 in C^2, on the interior rows of the composition.
    {
        const Grid g(2, 2.0, 8);
        const FormField f0 = random_field(g, 0, 0);
        const double a = max_abs_interior(DbarOperator(g, 2).apply(DbarOperator(g, 1).apply(f0)), 2);
        out.push_back(check_at_most("dbar o dbar = 0 (n = 2)", a, 1e-14 * std::max(1.0, 1.0 / (g.h() * g.h()))));
        details["dbar_dbar"] = a;
    }
    // Sparse stencil vs the independently assembled dense matrix.
    {
        const Grid g(1, 3.0, 12);
        const DenseSystem sys(g);
        const Eigen::MatrixXcd sparse = Eigen::MatrixXcd(DbarOperator(g, 1).matrix());
        const double diff = (sparse - sys.matrix).cwiseAbs().maxCoeff();
        out.push_back(check_at_most("sparse / dense operator agreement", diff, 1e-15 * sys.matrix.cwiseAbs().maxCoeff()));
        details["sparse_dense"] = diff;
    }
    // Minimal norm: CG against the dense oracle, kernel orthogonality, scaling.
    {
        const Grid g(1, 3.0, 12);
        const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
        const DbarOperator op(g, 1);
        const FormField omega = exact_form_data(random_field(g, 0, 2), op, 2);
        FormField rows = omega;
        for (std::size_t p = 0; p < g.points(); ++p) {
            if (!g.interior(p, 1)) rows.at(0, p) = {};
        }
        const WeightedMeasure wu = c_exp_weight(g, phi), wd = exp_weight(g, phi);
        SolveConfig sc = cfg.solver;
        sc.tolerance = 1e-13;
        sc.trust_data = true;
        const SolveResult s = solve_min_norm(rows, op, wu, wd, sc);
        const DenseSolution d = dense_min_norm(rows, wu, wd);
        const WeightedMeasure unit = WeightedMeasure::unit(g);
        const double rel = weighted_norm(s.u - d.u, unit) / weighted_norm(d.u, unit);
        double orth = 0.0;
        for (const FormField& k : d.kernel) {
            orth = std::max(orth, std::abs(weighted_inner(s.u, k, wu)) / (weighted_norm(s.u, wu) * weighted_norm(k, wu)));
        }
        out.push_back(check_at_most("CG vs dense minimal-norm solution", rel, 1e-8));
        out.push_back(check_at_most("kernel orthogonality of the CG solution", orth, 1e-8));
        out.push_back(check_at_most("dense oracle self-residual", d.residual, 1e-12));

        std::vector<double> doubled(wu.log_weights().begin(), wu.log_weights().end());
        for (double& l : doubled) l += std::log(2.0);
        const DenseSolution d2 = dense_min_norm(rows, WeightedMeasure::from_log(g, doubled), wd);
        out.push_back(check_at_most("dense argmin invariant under w_u -> 2 w_u",
                                    weighted_norm(d2.u - d.u, unit) / weighted_norm(d.u, unit), 1e-10));

        const cplx alpha(0.3, -1.7);
        const SolveResult s2 = solve_min_norm(alpha * rows, op, wu, wd, sc);
        out.push_back(check_at_most("solve(alpha omega) = alpha solve(omega)",
                                    weighted_norm(s2.u - alpha * s.u, unit) / weighted_norm(alpha * s.u, unit), 1e-10));
        details["dense_vs_cg"] = {{"relative_difference", rel}, {"kernel_orthogonality", orth},
                                  {"rank", d.rank}, {"kernel_dimension", d.kernel.size()}};
    }
    // Moment orthogonality of manufactured top-degree data.
    {
        const Grid g(1, 4.0, 64);
        DataSpec spec;
        spec.inner = 0.5;
        spec.outer = 2.5;
        const FormField omega = make_data(spec, g);
        const double defect = max_moment_defect(moment_orthogonality(omega, 6));
        out.push_back(check_at_most("moments of dbar v vanish (m <= 6)", defect, 1e-9));
        details["moment_defect"] = defect;
    }
    // Closed-form weight derivatives and strict plurisubharmonicity.
    {
        std::vector<CPoint> pts;
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        for (int i = 0; i < 8; ++i) pts.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
        const std::pair<const char*, WeightSpec> catalog[] = {
            {"gaussian", WeightSpec::gaussian(2, 1.0)},
            {"anisotropic-gaussian", WeightSpec::anisotropic_gaussian({1.0, 0.25})}};
        for (const auto& [name, w] : catalog) {
            out.push_back(check_at_most(std::string("finite differences, ") + name,
                                        fd_derivative_check(w, pts, 1e-4).max_error(), 1e-8));
        }
        // Differences of the cubic gradient carry an O(step^2) truncation term.
        const FdCheck q0 = fd_derivative_check(WeightSpec::radial_quartic(1, 0.0, 0.0, 1.0), {CPoint{}}, 1e-5);
        out.push_back(check_at_most("finite differences, radial-quartic at 0", q0.max_error(), 1e-8));

        const Grid g = cfg.grid();
        const WeightSpec w = cfg.weight();
        if (w.strictly_psh()) {
            const EigenField e = eigen_field(g, w);
            const double m = *std::min_element(e.values.begin(), e.values.end());
            out.push_back(check_at_least("smallest Hessian eigenvalue on the grid", m, 1e-300));
        }
    }
    // Cutoff legality over a unit shell.
    {
        const Grid g(1, 5.0, 128);
        const std::vector<double> chi = radial_cutoff(g, CPoint{}, 2.0, 3.0);
        bool legal = true;
        FormField f(g, 0);
        for (std::size_t p = 0; p < g.points(); ++p) {
            const double r = std::abs(g.z(p)[0]);
            legal = legal && chi[p] >= 0.0 && chi[p] <= 1.0 && (r > 2.0 || chi[p] == 1.0) && (r < 3.0 || chi[p] == 0.0);
            f.at(0, p) = chi[p];
        }
        out.push_back(check_true("0 <= chi <= 1, chi = 1 inside, 0 outside", legal));
        out.push_back(check_at_most("max |dbar chi| over a unit shell", max_abs_interior(DbarOperator(g, 1).apply(f), 1),
                                    1.0 + 1e-3));
    }
    // Cauchy transform residual.
    {
        const Grid g(1, 5.0, 128);
        DataSpec spec;
        spec.inner = 0.0;
        spec.outer = 2.0;
        const FormField v = make_potential(spec, g);
        const FormField omega = DbarOperator(g, 1).apply(v);
        const FormField du = DbarOperator(g, 1).apply(cauchy_transform(omega, 10, cfg.threads));
        double e = 0.0, m = 0.0;
        for (std::size_t p = 0; p < g.points(); ++p) {
            if (!g.interior(p, 1)) continue;
            e = std::max(e, std::abs(du.at(0, p) - omega.at(0, p)));
            m = std::max(m, std::abs(omega.at(0, p)));
        }
        out.push_back(check_at_most("dbar of the Cauchy transform reproduces omega (N = 128)", e / m, 0.02));
        details["cauchy_residual"] = e / m;
    }
    // Bumped weights equal phi on D.
    {
        const Grid g(2, 2.0, 8);
        const WeightSpec phi = WeightSpec::gaussian(2, 1.0);
        const BumpedWeight bw{phi, DefiningFunction{2, {}, 1.2}, ConvexCutoff{}, 7.0};
        const WeightedMeasure a = exp_bumped(g, bw), b = exp_weight(g, phi);
        const RegionMask in_d = RegionMask::sublevel(g, bw.defining, 0.0);
        double diff = 0.0;
        for (std::size_t p = 0; p < g.points(); ++p) {
            if (in_d.contains(p)) diff = std::max(diff, std::abs(a.log_weight(p) - b.log_weight(p)));
        }
        out.push_back(check_at_most("psi_k = phi on D", diff, 0.0));
    }
    return out;
}

// ---------------------------------------------------------------------------

int run_config(const json& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        json j = config;
        if (ov.threads) j["threads"] = *ov.threads;
        if (ov.seed) j["seed"] = *ov.seed;
        if (ov.out_dir) j["out_dir"] = *ov.out_dir;
        cfg = parse_config(j);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    const fs::path dir = cfg.out_dir.empty() ? fs::path("out") / cfg.name : fs::path(cfg.out_dir);

    RunResult r;
    json failure;
    int code = kExitOk;
    try {
        r = execute(cfg);
        code = r.exit_code;
    } catch (const SolverError& e) {
        code = kExitSolver;
        failure = {{"status", "solver-failure"}, {"error", e.what()}, {"stage", e.stage()},
                   {"residual_history_tail", json::array()}};
        const auto& h = e.residual_history();
        for (std::size_t i = h.size() > 20 ? h.size() - 20 : 0; i < h.size(); ++i) {
            failure["residual_history_tail"].push_back(h[i]);
        }
    } catch (const NumericalConsistencyError& e) {
        code = kExitSolver;
        failure = {{"status", "solver-failure"}, {"error", e.what()}};
    } catch (const DegenerateFitError& e) {
        code = kExitInvariant;
        failure = {{"status", "invariant-violation"}, {"error", e.what()}};
    } catch (const Error& e) {
        // Bad geometry, data too close to the faces, unknown weights ...
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (!failure.is_null()) {
        json head = {{"schema_version", kSchemaVersion},
                     {"experiment", to_string(cfg.kind)},
                     {"name", cfg.name},
                     {"theorem", theorem_label(to_string(cfg.kind), cfg.n)},
                     {"config", cfg.to_json()},
                     {"passed", false}};
        head.update(failure);
        r.report = std::move(head);
        r.summary = failure["error"].get<std::string>();
    }
    try {
        write_atomic(dir / "report.json", r.report.dump(2) + "\n");
        for (const auto& [name, content] : r.files) write_atomic(dir / name, content);
    } catch (const std::exception& e) {
        err << "error: writing reports to " << dir.string() << ": " << e.what() << '\n';
        return kExitConfig;
    }
    out << cfg.name << " [" << to_string(cfg.kind) << "] " << (code == kExitOk ? "PASS" : "FAIL") << ": "
        << r.summary << " -> " << (dir / "report.json").string() << '\n';
    for (const Assertion& a : r.assertions) {
        if (!a.passed) {
            err << "  violated: " << a.name << " = " << a.value << (a.at_least ? " < " : " > ") << a.limit << '\n';
        }
    }
    if (code == kExitSolver) err << "  solver failure: " << r.summary << '\n';
    return code;
}

int run_config_file(const fs::path& path, const Overrides& ov, std::ostream& out, std::ostream& err) {
    json j;
    try {
        j = read_config_file(path);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_config(j, ov, out, err);
}

}  // namespace dbarlab
