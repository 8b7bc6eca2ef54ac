// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "dbarlab/config.hpp"
#include "dbarlab/diagnostics.hpp"
#include "dbarlab/oracle.hpp"
#include "dbarlab/presets.hpp"
#include "dbarlab/procedures.hpp"
#include "dbarlab/runner.hpp"

using namespace dbarlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;  // runtime limit; <= 0 means none
    std::function<Outcome()> run;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ExperimentConfig preset_config(const std::string& name) {
    return parse_config(parse_toml(find_preset(name).text, name));
}

int threads() { return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u)); }

FormField random_potential(const Grid& g, int degree, int margin, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    FormField f(g, degree);
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t p = 0; p < g.points(); ++p)
            if (g.cells_to_boundary(p) >= margin) f.at(c, p) = cplx(n01(rng), n01(rng));
    return f;
}

Outcome complex_identity() {
    const Grid g(2, 2.0, 8);
    const SparseMatrix dd = DbarOperator(g, 2).matrix() * DbarOperator(g, 1).matrix();
    double worst = 0.0;
    for (int r = 0; r < dd.outerSize(); ++r) {
        if (!g.interior(static_cast<std::size_t>(r) % g.points(), 2)) continue;
        for (SparseMatrix::InnerIterator it(dd, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return {worst <= 1e-14, "max |coefficient| of dbar o dbar on interior rows " + sci(worst) + " (<= 1e-14)"};
}

double cauchy_residual(int N) {
    const Grid g(1, 5.0, N);
    DataSpec spec;
    spec.inner = 0.0;
    spec.outer = 2.0;
    const DbarOperator op(g, 1);
    const FormField omega = op.apply(make_potential(spec, g));
    const FormField du = op.apply(cauchy_transform(omega, 10, threads()));
    const WeightedMeasure unit = WeightedMeasure::unit(g);
    FormField diff(g, 1), ref(g, 1);
    for (std::size_t p = 0; p < g.points(); ++p) {
        if (!g.interior(p, 1)) continue;
        diff.at(0, p) = du.at(0, p) - omega.at(0, p);
        ref.at(0, p) = omega.at(0, p);
    }
    return weighted_norm(diff, unit) / weighted_norm(ref, unit);
}

Outcome cauchy_consistency() {
    const double e128 = cauchy_residual(128), e256 = cauchy_residual(256);
    const double factor = e128 / e256;
    return {e128 <= 0.02 && factor >= 3.5,
            "residual N=128 " + sci(e128) + " (<= 0.02), N=256 " + sci(e256) + ", improvement " + sci(factor) +
                " (>= 3.5)"};
}

Outcome min_norm_oracle() {
    const Grid g(1, 3.0, 12);
    const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
    const DbarOperator op(g, 1);
    FormField omega = exact_form_data(random_potential(g, 0, 2, 7), op, 2);
    for (std::size_t p = 0; p < g.points(); ++p)
        if (!g.interior(p, 1)) omega.at(0, p) = {};
    const WeightedMeasure wu = c_exp_weight(g, phi), wd = exp_weight(g, phi);
    SolveConfig sc;
    sc.tolerance = 1e-13;
    const SolveResult s = solve_min_norm(omega, op, wu, wd, sc);
    const DenseSolution d = dense_min_norm(omega, wu, wd);
    const WeightedMeasure unit = WeightedMeasure::unit(g);
    const double rel = weighted_norm(s.u - d.u, unit) / weighted_norm(d.u, unit);
    double orth = 0.0;
    for (const FormField& k : d.kernel)
        orth = std::max(orth, std::abs(weighted_inner(s.u, k, wu)) / (weighted_norm(s.u, wu) * weighted_norm(k, wu)));
    return {rel <= 1e-8 && orth <= 1e-8 && !d.kernel.empty(),
            "CG vs dense " + sci(rel) + " (<= 1e-8), kernel orthogonality " + sci(orth) + " over " +
                std::to_string(d.kernel.size()) + " kernel fields (<= 1e-8)"};
}

Outcome k_uniform_bound() {
    const ExperimentConfig cfg = preset_config("thm21_constants");
    const auto fam = solve_bumped_family(make_data(cfg.data, cfg.grid()), cfg.D->defining(cfg.n), cfg.eps, cfg.ks,
                                         cfg.weight(), cfg.solver, threads(), ConvexCutoff{cfg.cutoff_scale});
    double ratio0 = 0.0, worst = 0.0;
    for (const BumpedMember& m : fam) {
        if (m.k == 0.0) ratio0 = m.report.ratio;
        worst = std::max(worst, m.report.ratio);
    }
    const double spread = worst / ratio0;
    return {ratio0 > 0.0 && spread <= 1.10,
            "n=1 N=" + std::to_string(cfg.N) + ": max_k ratio " + sci(worst) + " / ratio at k=0 " + sci(ratio0) +
                " = " + sci(spread) + " (<= 1.10)"};
}

Outcome support_decay() {
    const ExperimentConfig cfg = preset_config("thm21_decay");
    const DecayReport d =
        compact_support_experiment(make_data(cfg.data, cfg.grid()), cfg.D->defining(cfg.n), cfg.eps, cfg.ks,
                                   cfg.weight(), cfg.solver, threads(), ConvexCutoff{cfg.cutoff_scale});
    const double limit = -0.8 * d.chi_eps;
    const bool last_is_12 = !d.rows.empty() && d.rows.back().k == 12.0;
    return {d.slope && *d.slope <= limit && d.support_fraction <= 1e-6 && last_is_12,
            "slope " + sci(d.slope.value_or(NAN)) + " (<= " + sci(limit) + "), tail fraction at k=12 " +
                sci(d.support_fraction) + " (<= 1e-6)"};
}

Outcome support_avoidance_check() {
    const ExperimentConfig cfg = preset_config("thm22_avoid");
    AvoidanceOptions opts;
    opts.domain = cfg.D->defining(2);
    opts.eps = cfg.eps;
    opts.k = cfg.k;
    opts.cutoff = ConvexCutoff{cfg.cutoff_scale};
    opts.h_tolerance = cfg.inner_tolerance;
    const AvoidanceResult a = support_avoidance(make_data(cfg.data, cfg.grid()), cfg.C->defining(2),
                                                cfg.U->defining(2), cfg.weight(), opts, cfg.solver);
    return {cfg.n == 2 && cfg.N == 16 && a.report.relative_u_on_U <= 1e-10 && a.report.residual <= 1e-7,
            "max|u| on U / max|v| " + sci(a.report.relative_u_on_U) + " (<= 1e-10), residual " +
                sci(a.report.residual) + " (<= 1e-7)"};
}

Outcome approximation() {
    const ExperimentConfig cfg = preset_config("thm31_approx");
    ApproxOptions opts;
    opts.stages = cfg.stages;
    opts.r0 = cfg.r0;
    opts.duality_tests = cfg.duality_tests;
    opts.seed = cfg.seed;
    opts.threads = threads();
    opts.correction_k = cfg.k;
    opts.correction_eps = cfg.eps;
    const ApproxReport rep = approximation_procedure(make_data(cfg.data, cfg.grid()), cfg.weight(), opts, cfg.solver).report;
    double gap = 0.0, cut = 0.0;
    int checked = 0;
    for (const ApproxStage& s : rep.stages) {
        cut = std::max(cut, s.cutoff_max_dbar);
        if (s.k < 2) continue;
        ++checked;
        gap = std::max(gap, s.mu_gap * s.k / (1.0 + rep.c_hat));
    }
    return {checked == 7 && gap <= 1.0 && cut <= 1.0 + 1e-3 && rep.duality_samples.size() == 20 &&
                rep.duality_residual <= 1e-6,
            "max_k k ||omega - mu_k|| / (1 + C_hat) " + sci(gap) + " (<= 1), max |dbar chi_k| " + sci(cut) +
                " (<= 1.001), duality " + sci(rep.duality_residual) + " over " +
                std::to_string(rep.duality_samples.size()) + " forms (<= 1e-6)"};
}

Outcome moments() {
    const Grid g(1, 4.0, 64);
    DataSpec spec;
    spec.inner = 0.5;
    spec.outer = 2.5;
    spec.center = {cplx(0.3, -0.2), {}};
    const auto m = moment_orthogonality(make_data(spec, g), 6);
    const double defect = max_moment_defect(m);
    return {m.size() == 7 && defect <= 1e-9,
            "max_m |<omega, z^m>| / (||omega|| R^m), m=0..6: " + sci(defect) + " (<= 1e-9)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("dbarlab-acceptance-" + std::to_string(::getpid()));
    std::ostringstream sink;
    std::size_t files = 0;
    std::string mismatch;
    for (const Preset& p : presets()) {
        const nlohmann::json j = parse_toml(p.text, p.name);
        for (const char* run : {"a", "b"}) {
            Overrides ov;
            ov.out_dir = (root / run / p.name).string();
            ov.threads = threads();
            run_config(j, ov, sink, sink);
        }
        for (const auto& e : fs::directory_iterator(root / "a" / p.name)) {
            ++files;
            const fs::path other = root / "b" / p.name / e.path().filename();
            if (!fs::exists(other) || slurp(e.path()) != slurp(other)) mismatch += " " + p.name + "/" + e.path().filename().string();
        }
    }
    fs::remove_all(root);
    return {files > 0 && mismatch.empty(),
            std::to_string(files) + " files over " + std::to_string(presets().size()) + " presets" +
                (mismatch.empty() ? ", all byte-identical" : ", differing:" + mismatch)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "discrete complex identity", 1.0, complex_identity},
        {2, "Cauchy oracle consistency", 30.0, cauchy_consistency},
        {3, "minimal-norm oracle equivalence", 5.0, min_norm_oracle},
        {4, "k-uniform norm bound", 120.0, k_uniform_bound},
        {5, "exponential support decay", 120.0, support_decay},
        {6, "support avoidance", 300.0, support_avoidance_check},
        {7, "approximation procedure", 300.0, approximation},
        {8, "moment orthogonality", 5.0, moments},
        {9, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
        const bool ok = o.passed && in_time;
        failed += !ok;
        std::printf("[%s] criterion %d: %s -- %s; %.2f s%s\n", ok ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                    secs, c.budget_s > 0.0 ? (" (< " + sci(c.budget_s) + " s)").c_str() : "");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
