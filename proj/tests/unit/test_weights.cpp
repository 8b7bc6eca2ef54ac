#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dbarlab/errors.hpp"
#include "dbarlab/oracle.hpp"
#include "dbarlab/weights.hpp"

using namespace dbarlab;

namespace {

std::vector<CPoint> sample_points(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<CPoint> pts;
    for (int i = 0; i < count; ++i) pts.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
    return pts;
}

}  // namespace

TEST(Weights, GaussianClosedForm) {
    const WeightSpec w = WeightSpec::gaussian(2, 1.5);
    const CPoint z{cplx(1.0, 2.0), cplx(-0.5, 0.25)};
    const WeightEval e = eval_weight(w, z);
    EXPECT_DOUBLE_EQ(e.value, 1.5 * (5.0 + 0.3125));
    EXPECT_EQ(e.gradient[0], 1.5 * std::conj(z[0]));
    EXPECT_EQ(e.hessian(0, 0), cplx(1.5));
    EXPECT_EQ(e.hessian(0, 1), cplx(0.0));
    EXPECT_DOUBLE_EQ(smallest_eigenvalue(e.hessian, 2), 1.5);
}

TEST(Weights, FiniteDifferencesAgreeWithClosedForms) {
    const auto pts = sample_points(12, 3);
    EXPECT_LE(fd_derivative_check(WeightSpec::gaussian(2, 1.0), pts, 1e-4).max_error(), 1e-8);
    EXPECT_LE(fd_derivative_check(WeightSpec::anisotropic_gaussian({2.0, 0.5}), pts, 1e-4).max_error(), 1e-8);
    // Quartic terms leave an O(step^2) truncation error relative to the size of the derivatives.
    EXPECT_LE(fd_derivative_check(WeightSpec::radial_quartic(2, 0.3, 1.0, 0.5), pts, 1e-4).max_error(), 1e-6);
}

TEST(Weights, RadialQuarticDegeneratesAtOrigin) {
    const WeightSpec w = WeightSpec::radial_quartic(1, 0.0, 0.0, 1.0);
    EXPECT_FALSE(w.strictly_psh());
    const WeightEval e = eval_weight(w, CPoint{});
    EXPECT_EQ(smallest_eigenvalue(e.hessian, 1), 0.0);
    const FdCheck fd = fd_derivative_check(w, {CPoint{}}, 1e-5);
    EXPECT_LE(fd.hessian_error, 1e-8);
}

TEST(Weights, RadialQuarticHessianOffDiagonal) {
    // H = (c1 + 2 c2 |z|^2) I + 2 c2 zbar_j z_k at z = (1, 1): [[6, 2], [2, 6]].
    const WeightEval e = eval_weight(WeightSpec::radial_quartic(2, 0.0, 0.0, 1.0), {cplx(1.0), cplx(1.0)});
    EXPECT_NEAR(e.hessian(0, 1).real(), 2.0, 1e-15);
    EXPECT_NEAR(smallest_eigenvalue(e.hessian, 2), 4.0, 1e-14);
}

TEST(Weights, SmallestEigenvalueRejectsNonHermitian) {
    Hessian h = Hessian::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    h(0, 1) = cplx(0.5, 0.0);
    h(1, 0) = cplx(0.0, 0.5);
    EXPECT_THROW(smallest_eigenvalue(h, 2), NumericalConsistencyError);
    Eigen::MatrixXcd m(2, 2);
    m << 2.0, 1.0, 1.0, 2.0;
    EXPECT_NEAR(smallest_eigenvalue(m), 1.0, 1e-15);
}

TEST(Weights, CatalogValidation) {
    EXPECT_THROW(WeightSpec::from_name("cosh", 1, {1.0}), ConfigError);
    EXPECT_THROW(WeightSpec::gaussian(1, -1.0), ConfigError);
    EXPECT_THROW(WeightSpec::anisotropic_gaussian({1.0, 0.0}), ConfigError);
    EXPECT_THROW(eval_weight(WeightSpec::gaussian(1, 1.0), {cplx(NAN, 0.0), {}}), NumericalConsistencyError);
    EXPECT_EQ(WeightSpec::from_name("anisotropic-gaussian", 2, {1.0, 0.5}).kind(),
              WeightSpec::Kind::anisotropic_gaussian);
}

TEST(Weights, CustomWeightIsChecked) {
    CustomWeight cw;
    cw.value = [](const CPoint& z) { return std::norm(z[0]) + std::pow(std::norm(z[0]), 2); };
    cw.gradient = [](const CPoint& z) { return CPoint{(1.0 + 2.0 * std::norm(z[0])) * std::conj(z[0]), {}}; };
    cw.hessian = [](const CPoint& z) {
        Hessian h = Hessian::Zero();
        h(0, 0) = 1.0 + 4.0 * std::norm(z[0]);
        return h;
    };
    const WeightSpec w = WeightSpec::custom(1, cw);
    EXPECT_LE(fd_derivative_check(w, sample_points(6, 5), 1e-4).max_error(), 1e-6);
    EXPECT_THROW(WeightSpec::custom(1, CustomWeight{}), ConfigError);
}

TEST(Weights, CutoffAndBumping) {
    const ConvexCutoff chi{2.0};
    EXPECT_EQ(chi(-1.0), 0.0);
    EXPECT_EQ(chi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(chi(0.5), 0.25);
    EXPECT_DOUBLE_EQ(chi(chi.level_for(3.0)), 3.0);
    const CutoffValues v = chi.eval(1.0);
    EXPECT_DOUBLE_EQ(v.d1, 6.0);
    EXPECT_DOUBLE_EQ(v.d2, 12.0);

    const DefiningFunction rho{1, {}, 1.0};
    EXPECT_DOUBLE_EQ(rho.eps_radius(3.0), 2.0);
    const BumpedWeight b{WeightSpec::gaussian(1, 1.0), rho, ConvexCutoff{}, 5.0};
    const CPoint inside{cplx(0.5, 0.5), {}};
    EXPECT_EQ(bumped_eval(b, inside).psi, 0.5);
    const CPoint outside{cplx(2.0, 0.0), {}};
    EXPECT_DOUBLE_EQ(bumped_eval(b, outside).psi, 4.0 + 5.0 * 27.0);
    EXPECT_DOUBLE_EQ(bumped_eval(b, outside).c_lower, 1.0);
}

TEST(Weights, EigenFieldOnGrid) {
    const Grid g(2, 1.0, 8);
    const EigenField e = eigen_field(g, WeightSpec::anisotropic_gaussian({1.0, 0.25}));
    ASSERT_EQ(e.values.size(), g.points());
    for (double v : e.values) EXPECT_DOUBLE_EQ(v, 0.25);
    EXPECT_THROW(eigen_field(g, WeightSpec::gaussian(1, 1.0)), ShapeError);
}
