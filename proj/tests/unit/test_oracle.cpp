#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dbarlab/errors.hpp"
#include "dbarlab/oracle.hpp"
#include "dbarlab/runner.hpp"

using namespace dbarlab;

TEST(Oracle, RectangleIntegralMatchesQuadrature) {
    // Midpoint rule on a fine mesh, away from the singularity.
    const double x1 = 0.5, x2 = 1.5, y1 = -0.25, y2 = 0.75;
    const int m = 800;
    cplx s{};
    const double dx = (x2 - x1) / m, dy = (y2 - y1) / m;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += 1.0 / cplx(x1 + (i + 0.5) * dx, y1 + (j + 0.5) * dy);
    s *= dx * dy;
    EXPECT_NEAR(std::abs(rectangle_inverse_integral(x1, x2, y1, y2) - s), 0.0, 1e-6);
    // Symmetric square about the singularity integrates to zero.
    EXPECT_NEAR(std::abs(rectangle_inverse_integral(-1, 1, -1, 1)), 0.0, 1e-14);
}

TEST(Oracle, CauchyTransformOfDiscIndicatorProfile) {
    // dbar of the transform returns omega, converging at second order.
    std::vector<double> err;
    for (int N : {32, 64}) {
        const Grid g(1, 5.0, N);
        DataSpec spec;
        spec.inner = 0.0;
        spec.outer = 2.0;
        const DbarOperator op(g, 1);
        const FormField omega = op.apply(make_potential(spec, g));
        const FormField du = op.apply(cauchy_transform(omega, 4, 2));
        double e = 0.0;
        for (std::size_t p = 0; p < g.points(); ++p)
            if (g.interior(p, 1)) e = std::max(e, std::abs(du.at(0, p) - omega.at(0, p)));
        err.push_back(e / omega.max_abs());
    }
    EXPECT_GT(err[0] / err[1], 3.0);
}

TEST(Oracle, CauchyTransformPreconditions) {
    const Grid g(1, 1.0, 16);
    const FormField one = FormField::from_function(g, 1, [](int, const CPoint&) { return cplx(1.0); });
    EXPECT_THROW(cauchy_transform(one, 2), PreconditionError);
    EXPECT_THROW(cauchy_transform(FormField(Grid(2, 1.0, 8), 1)), ShapeError);
}

TEST(Oracle, DenseSystemLimits) {
    EXPECT_THROW(DenseSystem(Grid(2, 1.0, 8)), OracleError);
    EXPECT_THROW(DenseSystem(Grid(1, 1.0, 34)), OracleError);
    const DenseSystem s(Grid(1, 1.0, 8));
    EXPECT_EQ(s.interior_rows.size(), 36u);
    EXPECT_EQ(s.interior_matrix().rows(), 36);
}

TEST(Oracle, DenseMinNormIsMinimalAndSolves) {
    const Grid g(1, 2.0, 10);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    FormField v(g, 0);
    for (std::size_t p = 0; p < g.points(); ++p)
        if (g.cells_to_boundary(p) >= 2) v.at(0, p) = cplx(n01(rng), n01(rng));
    FormField omega = exact_form_data(v, DbarOperator(g, 1), 2);
    const WeightedMeasure w = WeightedMeasure::unit(g);
    const DenseSolution d = dense_min_norm(omega, w, w);
    EXPECT_LE(d.residual, 1e-12);
    EXPECT_FALSE(d.kernel.empty());
    // Adding a kernel element keeps the residual but grows the norm.
    const FormField other = d.u + d.kernel.front();
    EXPECT_GT(weighted_norm(other, w), weighted_norm(d.u, w));
    for (const FormField& k : d.kernel) EXPECT_LE(std::abs(weighted_inner(d.u, k, w)), 1e-10 * weighted_norm(d.u, w));
}

TEST(Oracle, FdStepRange) {
    EXPECT_THROW(fd_derivative_check(WeightSpec::gaussian(1, 1.0), {CPoint{}}, 0.1), ConfigError);
}
