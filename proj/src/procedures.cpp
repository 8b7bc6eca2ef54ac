#include "dbarlab/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "dbarlab/errors.hpp"
#include "dbarlab/summation.hpp"

namespace dbarlab {

namespace {

double distance(const CPoint& a, const CPoint& b, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

FormField scalar_field(const Grid& g, const std::vector<double>& values) {
    FormField f(g, 0);
    for (std::size_t p = 0; p < values.size(); ++p) f.at(0, p) = values[p];
    return f;
}

// Zero f outside the mask.
FormField restrict_to(FormField f, const RegionMask& mask) {
    for (std::size_t p = 0; p < f.grid().points(); ++p) {
        if (mask.contains(p)) continue;
        for (int c = 0; c < f.components(); ++c) f.at(c, p) = {};
    }
    return f;
}

SolverError staged(const SolverError& e, const std::string& stage) {
    return SolverError(stage + ": " + e.what(), e.residual_history(), stage);
}

}  // namespace

double smoothstep5(double t) noexcept {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

std::vector<double> radial_cutoff(const Grid& grid, const CPoint& center, double inner, double outer) {
    if (!(outer > inner)) throw ConfigError("radial cutoff: outer radius must exceed inner radius");
    std::vector<double> chi(grid.points());
    for (std::size_t p = 0; p < chi.size(); ++p) {
        const double d = distance(grid.z(p), center, grid.n());
        chi[p] = 1.0 - smoothstep5((d - inner) / (outer - inner));
    }
    return chi;
}

// ---------------------------------------------------------------------------

DecayReport compact_support_experiment(const FormField& omega, const DefiningFunction& domain, double eps,
                                       const std::vector<double>& ks, const WeightSpec& phi, const SolveConfig& cfg,
                                       int threads, const ConvexCutoff& cutoff) {
    if (ks.empty()) throw ConfigError("decay experiment: need at least one k");
    DecayReport rep;
    rep.eps = eps;
    rep.chi_eps = cutoff(eps);
    rep.slope_target = -rep.chi_eps;
    const Grid& g = omega.grid();
    rep.omega_norm = weighted_norm(omega, exp_weight(g, phi));

    if (omega.is_zero()) {
        rep.trivial = true;
        for (double k : ks) rep.rows.push_back(DecayRow{k, 0.0, 0.0, 0.0, 0.0, 0, 0.0});
        return rep;
    }

    const auto fam = solve_bumped_family(omega, domain, eps, ks, phi, cfg, threads, cutoff);
    for (const BumpedMember& m : fam) rep.c_hat = std::max(rep.c_hat, m.report.ratio);

    std::size_t k_min = 0, k_max = 0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const BumpedMember& m = fam[i];
        DecayRow row;
        row.k = m.k;
        row.tail = m.tail;
        row.ratio = m.report.ratio;
        row.mass = m.mass;
        row.bound_prediction = rep.c_hat * rep.c_hat * std::exp(-m.k * rep.chi_eps) * rep.omega_norm * rep.omega_norm;
        row.iterations = m.report.iterations;
        row.residual = m.report.residual;
        rep.rows.push_back(row);
        if (m.k < fam[k_min].k) k_min = i;
        if (m.k > fam[k_max].k) k_max = i;
    }
    const double ratio0 = rep.rows[k_min].ratio;
    for (const DecayRow& r : rep.rows) rep.ratio_spread = std::max(rep.ratio_spread, ratio0 > 0 ? r.ratio / ratio0 : 0.0);
    rep.support_fraction = rep.rows[k_max].mass > 0.0 ? rep.rows[k_max].tail / rep.rows[k_max].mass : 0.0;

    // Least squares fit of log(tail) = a + b k.
    std::vector<double> xs, ys;
    for (const DecayRow& r : rep.rows) {
        if (r.tail > kTailFloor) {
            xs.push_back(r.k);
            ys.push_back(std::log(r.tail));
        }
    }
    rep.fit_points = static_cast<int>(xs.size());
    if (xs.size() < 3) {
        throw DegenerateFitError("decay experiment: only " + std::to_string(xs.size()) +
                                 " tails above the 1e-14 floor (need 3)");
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateFitError("decay experiment: fit points share one k");
    rep.slope = sxy / sxx;
    rep.intercept = my - *rep.slope * mx;
    return rep;
}

// ---------------------------------------------------------------------------

AvoidanceResult support_avoidance(const FormField& omega, const DefiningFunction& C, const DefiningFunction& U,
                                  const WeightSpec& phi, const AvoidanceOptions& opts, const SolveConfig& cfg) {
    const Grid& g = omega.grid();
    if (g.n() != 2 || omega.degree() != 2) {
        throw PreconditionError("support_avoidance: implemented for n = 2, q = 2 only");
    }
    if (C.n != 2 || U.n != 2 || opts.domain.n != 2 || phi.n() != 2) {
        throw PreconditionError("support_avoidance: geometry and weight must live in C^2");
    }
    const double h = g.h();
    const double gap = opts.margin_cells * h;
    if (distance(U.center, C.center, 2) + U.radius + gap > C.radius) {
        throw PreconditionError("support_avoidance: closure of U must lie inside C with a " +
                                std::to_string(opts.margin_cells) + "-cell margin");
    }
    for (int j = 0; j < 2; ++j) {
        // One cell suffices here: rows of C only need to be stencil-closed.
        const double lim = g.R() - C.radius - h;
        if (std::abs(C.center[j].real()) > lim || std::abs(C.center[j].imag()) > lim) {
            throw PreconditionError("support_avoidance: C must lie inside the box with a one-cell margin");
        }
    }
    for (std::size_t p = 0; p < g.points(); ++p) {
        if (omega.at(0, p) == cplx{}) continue;
        if (distance(g.z(p), C.center, 2) < C.radius + gap) {
            throw PreconditionError("support_avoidance: supp omega meets the closure of C (or its margin)");
        }
    }

    AvoidanceResult res{FormField(g, 1), {}};
    AvoidanceReport& rep = res.report;
    const RegionMask c_mask = RegionMask::ball(g, C.center, C.radius);
    const RegionMask c_rows = c_mask.stencil_closed();
    const RegionMask u_mask = RegionMask::sublevel(g, U, 1e-12 * (1.0 + U.radius * U.radius));
    const double inner = U.radius + h;
    const double width = std::min(0.3 * C.radius, (C.radius - 1.5 * h) - inner);
    if (!(width > 0.0)) throw PreconditionError("support_avoidance: no room for the cutoff annulus between U and C");
    rep.chi_inner = inner;
    rep.chi_outer = inner + width;
    if (omega.is_zero()) {
        rep.trivial = true;
        return res;
    }

    // Step 1: compactly supported solution of dbar v = omega.
    FormField v(g, 1);
    try {
        auto fam = solve_bumped_family(omega, opts.domain, opts.eps, {opts.k}, phi, cfg, 1, opts.cutoff);
        v = std::move(fam[0].u);
        rep.v_residual = fam[0].report.residual;
    } catch (const SolverError& e) {
        throw staged(e, "step 1");
    }
    const DbarOperator d1(g, 2);
    const DbarOperator d0(g, 1);
    const WeightedMeasure unit = WeightedMeasure::unit(g);

    // Step 2: v must be closed on C.
    const FormField dv = d1.apply(v);
    rep.closed_on_C = weighted_norm(restrict_to(dv, c_rows), unit) / weighted_norm(omega, unit);
    if (!(rep.closed_on_C <= opts.closed_tol)) {
        throw NumericalConsistencyError("support_avoidance step 2: dbar v is not small on C (relative " +
                                        std::to_string(rep.closed_on_C) + ")");
    }

    // Step 3: dbar h = v on C, unweighted minimal norm.
    SolveConfig hcfg = cfg;
    hcfg.tolerance = opts.h_tolerance;
    hcfg.trust_data = true;
    hcfg.allow_inexact = true;
    SolveResult hs{FormField(g, 0), {}};
    try {
        hs = solve_min_norm(restrict_to(v, c_rows), d0, unit, unit, hcfg, SolveDomain{c_mask, c_rows});
    } catch (const SolverError& e) {
        throw staged(e, "step 3");
    }
    const FormField& hfield = hs.u;
    rep.h_residual = hs.report.residual;
    rep.h_iterations = hs.report.iterations;

    // Step 4: chi = 1 on U, 0 near the boundary of C.
    const std::vector<double> chi = radial_cutoff(g, C.center, rep.chi_inner, rep.chi_outer);

    // Step 5: u = v - dbar(chi h), and the expanded form v - chi v - dbar chi ^ h.
    const FormField chi_h = multiply_pointwise(chi, hfield);
    const FormField d_chi_h = d0.apply(chi_h);
    res.u = v - d_chi_h;
    const FormField dh = d0.apply(hfield);
    const FormField wedge_term = d_chi_h - multiply_pointwise(chi, dh);
    const FormField u_b = v - multiply_pointwise(chi, v) - wedge_term;

    rep.max_v = v.max_abs();
    rep.max_v_on_U = max_abs_on(v, u_mask);
    rep.max_u_on_U = max_abs_on(res.u, u_mask);
    rep.relative_u_on_U = rep.max_v > 0.0 ? rep.max_u_on_U / rep.max_v : 0.0;
    rep.assembly_defect = rep.max_v > 0.0 ? (res.u - u_b).max_abs() / rep.max_v : 0.0;
    rep.chi_h_defect = rep.max_v > 0.0 ? multiply_pointwise(chi, v - dh).max_abs() / rep.max_v : 0.0;

    const WeightedMeasure wphi = exp_weight(g, phi);
    const RegionMask interior = RegionMask::interior(g, 1);
    rep.residual = weighted_norm(restrict_to(d1.apply(res.u) - omega, interior), wphi) /
                   weighted_norm(restrict_to(omega, interior), wphi);
    rep.v_norm = weighted_norm(v, unit);
    rep.h_norm = weighted_norm(hfield, unit);
    rep.u_norm = weighted_norm(res.u, unit);
    return res;
}

// ---------------------------------------------------------------------------

namespace {

struct RadialTail {
    std::vector<double> radius;  // ascending
    std::vector<double> suffix;  // mass of points with radius >= radius[i]

    // Smallest r with tail(r) <= target, where tail(r) = mass of |z| >= r.
    double smallest_radius(double target) const {
        if (suffix.empty() || suffix[0] <= target) return 0.0;
        for (std::size_t i = 1; i < radius.size(); ++i) {
            if (radius[i] != radius[i - 1] && suffix[i] <= target) return radius[i];
        }
        return std::nextafter(radius.back(), std::numeric_limits<double>::infinity());
    }
};

RadialTail radial_tail(const FormField& omega, const WeightedMeasure& w) {
    const Grid& g = omega.grid();
    std::vector<std::pair<double, double>> pts;
    pts.reserve(g.points());
    for (std::size_t p = 0; p < g.points(); ++p) {
        double m = 0.0;
        for (int c = 0; c < omega.components(); ++c) {
            const double a = std::abs(omega.at(c, p));
            if (a > 0.0) m += std::exp(2.0 * std::log(a) + w.log_weight(p));
        }
        pts.emplace_back(std::sqrt(norm2(g.z(p), g.n())), m * g.cell_measure());
    }
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    RadialTail t;
    t.radius.resize(pts.size());
    t.suffix.resize(pts.size());
    CompensatedSum acc;
    for (std::size_t i = pts.size(); i-- > 0;) {
        acc.add(pts[i].second);
        t.radius[i] = pts[i].first;
        t.suffix[i] = acc.value();
    }
    return t;
}

struct TestForm {
    CPoint center{};
    double radius = 1.0;
    cplx alpha{}, beta{};
};

}  // namespace

ApproxResult approximation_procedure(const FormField& omega, const WeightSpec& phi, const ApproxOptions& opts,
                                     const SolveConfig& cfg) {
    const Grid& g = omega.grid();
    const int n = g.n();
    const int q = omega.degree();
    if (q < 1) throw ShapeError("approximation: omega must have degree >= 1");
    if (phi.n() != n) throw ShapeError("approximation: weight and grid dimensions differ");
    if (opts.stages < 1) throw ConfigError("approximation: need at least one stage");
    if (opts.duality_tests < 0) throw ConfigError("approximation: duality test count must be non-negative");

    const WeightedMeasure wphi = exp_weight(g, phi);
    const WeightedMeasure wc = c_exp_weight(g, phi);
    const RadialTail tail = radial_tail(omega, wphi);

    ApproxResult res{FormField(g, q - 1), {}};
    ApproxReport& rep = res.report;
    std::vector<double> radii(opts.stages + 1);
    radii[0] = opts.r0.value_or(tail.smallest_radius(1.0));
    for (int k = 1; k <= opts.stages; ++k) {
        radii[k] = std::max(radii[k - 1] + 1.0, tail.smallest_radius(1.0 / (k + 1)));
    }
    rep.r0 = radii[0];
    if (!(radii[opts.stages] + 1.0 < g.R())) {
        throw ConfigError("approximation: radius schedule r_K = " + std::to_string(radii[opts.stages]) +
                          " does not satisfy r_K + 1 < R = " + std::to_string(g.R()));
    }

    const DbarOperator dq(g, q);
    const DbarOperator d0(g, 1);
    const CPoint origin{};
    SolveConfig vcfg = cfg;
    if (q == n) vcfg.trust_data = true;  // mu_k = chi_k omega is only approximately orthogonal

    for (int k = 1; k <= opts.stages; ++k) {
        ApproxStage st;
        st.k = k;
        st.r_k = radii[k];
        const std::vector<double> chi = radial_cutoff(g, origin, radii[k - 1], radii[k]);
        st.cutoff_max_dbar = max_abs_interior(d0.apply(scalar_field(g, chi)), 1);

        const RegionMask ball_k = RegionMask::ball(g, origin, radii[k]);
        const RegionMask ball_prev = RegionMask::ball(g, origin, radii[k - 1]);
        st.tail_omega = tail_mass(omega, ball_k.complement(), wphi);
        st.shell_mass = tail_mass(omega, ball_k.intersect(ball_prev.complement()), wphi);

        const FormField omega_k = multiply_pointwise(chi, omega);
        FormField u_k(g, q);
        if (q < n) {
            const DbarOperator dnext(g, q + 1);
            const FormField data = dnext.apply(omega_k);
            st.dbar_omega_k_norm = weighted_norm(data, wphi);
            if (!data.is_zero()) {
                const DefiningFunction ball{n, origin, radii[k] + 2.0 * g.h()};
                try {
                    auto fam = solve_bumped_family(data, ball, opts.correction_eps, {opts.correction_k}, phi, cfg,
                                                   opts.threads);
                    u_k = std::move(fam[0].u);
                    rep.c_hat = std::max(rep.c_hat, fam[0].report.ratio);
                    ++rep.correction_solves;
                } catch (const SolverError& e) {
                    throw staged(e, "stage " + std::to_string(k) + " correction");
                }
            }
        }
        const FormField mu_k = omega_k - u_k;
        st.u_k_norm = weighted_norm(u_k, wphi);
        st.mu_gap = weighted_norm(omega - mu_k, wphi);
        st.omega_gap = weighted_norm(omega - omega_k, wphi);
        if (q == n) st.mu_moment_defect = max_moment_defect(moment_orthogonality(mu_k, cfg.orthogonality_degree));

        try {
            SolveResult s = solve_min_norm(mu_k, dq, wc, wphi, vcfg);
            st.v_k_norm = s.report.u_norm;
            st.v_k_residual = s.report.residual;
            st.v_k_iterations = s.report.iterations;
            res.v = std::move(s.u);
        } catch (const SolverError& e) {
            throw staged(e, "stage " + std::to_string(k) + " solve");
        }
        rep.stages.push_back(st);
    }

    // Duality check on B_{K-1}, where mu_K agrees with omega - u_K.
    const double r_test = radii[opts.stages - 1];
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<TestForm> tests(opts.duality_tests);
    for (TestForm& t : tests) {
        t.radius = std::min(0.5 + unif(rng), 0.5 * r_test);
        const double reach = std::max(r_test - t.radius - 2.0 * g.h(), 0.0);
        // Uniform direction, radius ~ reach * U^{1/(2n)}.
        double norm = 0.0;
        std::array<double, 4> dir{};
        for (int a = 0; a < 2 * n; ++a) {
            dir[a] = gauss(rng);
            norm += dir[a] * dir[a];
        }
        const double rad = reach * std::pow(unif(rng), 1.0 / (2 * n)) / std::max(std::sqrt(norm), 1e-300);
        for (int j = 0; j < n; ++j) t.center[j] = cplx(dir[2 * j] * rad, dir[2 * j + 1] * rad);
        t.alpha = cplx(gauss(rng), gauss(rng));
        t.beta = cplx(gauss(rng), gauss(rng));
    }
    const int tdeg = n - q;
    const WeightedMeasure unit = WeightedMeasure::unit(g);
    const double v_norm = weighted_norm(res.v, unit);
    const double omega_norm = weighted_norm(omega, unit);
    const double sign = (q % 2 == 0) ? 1.0 : -1.0;
    rep.duality_samples.assign(tests.size(), 0.0);
    parallel_for(tests.size(), opts.threads, [&](std::size_t i) {
        const TestForm& t = tests[i];
        FormField tf = FormField::from_function(g, tdeg, [&](int c, const CPoint& z) {
            const double d = distance(z, t.center, n);
            const double bump = 1.0 - smoothstep5(d / t.radius);
            // Different components get different polynomial factors.
            return bump * (c == 0 ? t.alpha + t.beta * z[0] : t.beta - t.alpha * z[n - 1]);
        });
        const DbarOperator dt(g, tdeg + 1);
        const FormField dtf = dt.apply(tf);
        const cplx lhs = wedge_pairing(res.v, dtf);
        const cplx rhs = sign * wedge_pairing(omega, tf);
        const double scale = v_norm * weighted_norm(dtf, unit) + omega_norm * weighted_norm(tf, unit);
        rep.duality_samples[i] = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    });
    for (double d : rep.duality_samples) rep.duality_residual = std::max(rep.duality_residual, d);
    return res;
}

}  // namespace dbarlab
