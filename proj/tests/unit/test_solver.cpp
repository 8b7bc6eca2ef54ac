#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "dbarlab/errors.hpp"
#include "dbarlab/runner.hpp"
#include "dbarlab/solver.hpp"

using namespace dbarlab;

namespace {

FormField bump_data(const Grid& g, double inner = 0.3, double outer = 1.5) {
    DataSpec spec;
    spec.degree = g.n();
    spec.inner = inner;
    spec.outer = outer;
    return make_data(spec, g);
}

}  // namespace

TEST(Solver, OneVariableSolveReachesTolerance) {
    const Grid g(1, 3.0, 32);
    const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
    const FormField omega = bump_data(g);
    const DbarOperator op(g, 1);
    const SolveResult s = solve_min_norm(omega, op, c_exp_weight(g, phi), exp_weight(g, phi));
    EXPECT_TRUE(s.report.converged);
    EXPECT_LE(s.report.residual, 1e-10);
    EXPECT_GT(s.report.ratio, 0.0);
    EXPECT_LE(s.report.precheck, 1e-9);
    FormField r = op.apply(s.u) - omega;
    EXPECT_LE(max_abs_interior(r, 1), 1e-8 * omega.max_abs());
}

TEST(Solver, ClosedDataInTwoVariables) {
    const Grid g(2, 3.0, 12);
    DataSpec spec;
    spec.degree = 1;
    spec.inner = 0.3;
    spec.outer = 1.5;
    const FormField omega = make_data(spec, g);
    const WeightSpec phi = WeightSpec::gaussian(2, 1.0);
    const SolveResult s = solve_min_norm(omega, DbarOperator(g, 1), c_exp_weight(g, phi), exp_weight(g, phi));
    EXPECT_LE(s.report.residual, 1e-10);
    EXPECT_LE(s.report.precheck, 1e-8);
}

TEST(Solver, RejectsNonClosedAndObstructedData) {
    const Grid g(2, 2.0, 8);
    const WeightSpec phi = WeightSpec::gaussian(2, 1.0);
    const FormField not_closed = FormField::from_function(g, 1, [](int c, const CPoint& z) {
        return c == 0 ? cplx(std::exp(-norm2(z, 2))) * z[1] * std::conj(z[1]) : cplx{};
    });
    EXPECT_THROW(solve_min_norm(not_closed, DbarOperator(g, 1), c_exp_weight(g, phi), exp_weight(g, phi)),
                 PreconditionError);

    const Grid g1(1, 3.0, 16);
    const WeightSpec phi1 = WeightSpec::gaussian(1, 1.0);
    FormField bump = FormField::from_function(g1, 1, [](int, const CPoint& z) { return cplx(std::exp(-4.0 * std::norm(z[0]))); });
    EXPECT_THROW(solve_min_norm(bump, DbarOperator(g1, 1), c_exp_weight(g1, phi1), exp_weight(g1, phi1)),
                 PreconditionError);
}

TEST(Solver, ZeroDataGivesZeroAndShapeErrors) {
    const Grid g(1, 2.0, 16);
    const WeightedMeasure u = WeightedMeasure::unit(g);
    const SolveResult zero = solve_min_norm(FormField(g, 1), DbarOperator(g, 1), u, u);
    EXPECT_TRUE(zero.u.is_zero());
    EXPECT_EQ(zero.report.iterations, 0);
    EXPECT_THROW(solve_min_norm(FormField(Grid(1, 2.0, 8), 1), DbarOperator(g, 1), u, u), ShapeError);
    SolveConfig bad;
    bad.tolerance = 2.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Solver, IterationCapRaisesWithHistory) {
    const Grid g(1, 3.0, 32);
    const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
    SolveConfig cfg;
    cfg.max_iterations = 3;
    try {
        solve_min_norm(bump_data(g), DbarOperator(g, 1), c_exp_weight(g, phi), exp_weight(g, phi), cfg);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_FALSE(e.residual_history().empty());
    }
    cfg.allow_inexact = true;
    const SolveResult s = solve_min_norm(bump_data(g), DbarOperator(g, 1), c_exp_weight(g, phi), exp_weight(g, phi), cfg);
    EXPECT_FALSE(s.report.converged);
}

TEST(Solver, BumpedFamilyIsThreadCountIndependent) {
    const Grid g(1, 3.0, 24);
    const FormField omega = bump_data(g, 0.3, 1.2);
    const DefiningFunction d{1, {}, 1.6};
    const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
    const auto a = solve_bumped_family(omega, d, 1.0, {0.0, 4.0, 8.0}, phi, {}, 1);
    const auto b = solve_bumped_family(omega, d, 1.0, {0.0, 4.0, 8.0}, phi, {}, 3);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].k, b[i].k);
        EXPECT_EQ(a[i].tail, b[i].tail);
        EXPECT_EQ(a[i].report.ratio, b[i].report.ratio);
    }
    EXPECT_LT(a[2].tail, a[0].tail);
    EXPECT_THROW(solve_bumped_family(omega, DefiningFunction{1, {}, 0.5}, 1.0, {0.0}, phi), PreconditionError);
}

TEST(Solver, EstimateConstantTakesTheMaximum) {
    const Grid g(1, 3.0, 24);
    const WeightSpec phi = WeightSpec::gaussian(1, 1.0);
    const FormField omega = bump_data(g, 0.3, 1.2);
    const ConstantEstimate e = estimate_constant(
        {{omega, c_exp_weight(g, phi), exp_weight(g, phi)}, {omega, WeightedMeasure::unit(g), WeightedMeasure::unit(g)}});
    ASSERT_EQ(e.reports.size(), 2u);
    EXPECT_EQ(e.c_hat, std::max(e.reports[0].ratio, e.reports[1].ratio));
    EXPECT_THROW(estimate_constant({}), ConfigError);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
    std::vector<std::atomic<int>> hit(100);
    parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i]++; });
    for (auto& h : hit) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                     if (i == 7) throw ConfigError("boom");
                 }),
                 ConfigError);
}
