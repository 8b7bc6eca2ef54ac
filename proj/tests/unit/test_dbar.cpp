#include <gtest/gtest.h>

#include <random>

#include "dbarlab/dbar.hpp"
#include "dbarlab/diagnostics.hpp"
#include "dbarlab/errors.hpp"
#include "dbarlab/measure.hpp"
#include "dbarlab/polynomial.hpp"

using namespace dbarlab;

namespace {

FormField random_field(const Grid& g, int degree, std::uint64_t seed, int margin = 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    FormField f(g, degree);
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t p = 0; p < g.points(); ++p)
            if (g.cells_to_boundary(p) >= margin) f.at(c, p) = cplx(n01(rng), n01(rng));
    return f;
}

}  // namespace

TEST(Dbar, HolomorphicPolynomialsAreAnnihilated) {
    const Grid g(1, 2.0, 16);
    const DbarOperator op(g, 1);
    const FormField z2 = FormField::from_function(g, 0, [](int, const CPoint& z) { return z[0] * z[0]; });
    // Second-order one-sided faces are exact on quadratics too.
    EXPECT_LE(op.apply(z2).max_abs(), 1e-13);
    const FormField zbar = FormField::from_function(g, 0, [](int, const CPoint& z) { return std::conj(z[0]); });
    const FormField one = op.apply(zbar);
    for (std::size_t p = 0; p < g.points(); ++p) EXPECT_NEAR(std::abs(one.at(0, p) - 1.0), 0.0, 1e-13);
}

TEST(Dbar, ComposedOperatorVanishesOnInterior) {
    const Grid g(2, 2.0, 8);
    const FormField f = random_field(g, 0, 11);
    const FormField dd = DbarOperator(g, 2).apply(DbarOperator(g, 1).apply(f));
    EXPECT_LE(max_abs_interior(dd, 2), 1e-14 * 4.0 / (g.h() * g.h()));
}

TEST(Dbar, ComponentSignConvention) {
    // (dbar f)_{12} = d/dzbar_1 f_2 - d/dzbar_2 f_1; f = (zbar_2, 0) gives -1.
    const Grid g(2, 1.0, 8);
    const FormField f = FormField::from_function(g, 1, [](int c, const CPoint& z) {
        return c == 0 ? std::conj(z[1]) : cplx{};
    });
    const FormField w = DbarOperator(g, 2).apply(f);
    EXPECT_NEAR(std::abs(w.at(0, 100) + 1.0), 0.0, 1e-13);
}

TEST(Dbar, AdjointMatchesWeightedInnerProduct) {
    const Grid g(1, 2.0, 12);
    const DbarOperator op(g, 1);
    const WeightSpec phi = WeightSpec::gaussian(1, 0.5);
    const WeightedMeasure ws = c_exp_weight(g, phi), wt = exp_weight(g, phi);
    const FormField f = random_field(g, 0, 1), h = random_field(g, 1, 2);
    const cplx lhs = weighted_inner(op.apply(f), h, wt);
    const cplx rhs = weighted_inner(f, op.adjoint_apply(h, ws, wt), ws);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}

TEST(Dbar, ShapeChecks) {
    const Grid g(1, 1.0, 8);
    EXPECT_THROW(DbarOperator(g, 2), ShapeError);
    EXPECT_THROW(DbarOperator(g, 0), ShapeError);
    EXPECT_THROW(DbarOperator(g, 1).apply(FormField(g, 1)), ShapeError);
}

TEST(Polynomial, DiscreteMonomialsAreInTheStencilKernel) {
    const double h = 0.125;
    for (int m = 0; m <= 6; ++m) {
        const XYPolynomial g = discrete_monomial(m, h);
        EXPECT_LE(g.centred_dzbar(h).max_abs_coeff(), 1e-12) << "m = " << m;
        const XYPolynomial z = XYPolynomial::z_power(m);
        const cplx at(0.7, -0.3);
        EXPECT_NEAR(std::abs(z(at) - std::pow(at, m)), 0.0, 1e-14);
        EXPECT_LE(std::abs(g(at) - z(at)), m <= 2 ? 0.0 : 10.0 * h * h);
    }
    const cplx at(0.4, 0.9);
    EXPECT_NEAR(std::abs(discrete_monomial(3, h)(at) - (std::pow(at, 3) - h * h * std::conj(at))), 0.0, 1e-14);
}
