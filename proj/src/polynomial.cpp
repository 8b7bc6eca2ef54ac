#include "dbarlab/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dbarlab/errors.hpp"

namespace dbarlab {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Exponent pairs with a + b <= d in a fixed order.
std::vector<std::pair<int, int>> exponents(int d) {
    std::vector<std::pair<int, int>> out;
    for (int t = 0; t <= d; ++t) {
        for (int b = 0; b <= t; ++b) out.emplace_back(t - b, b);
    }
    return out;
}

}  // namespace

XYPolynomial::XYPolynomial(int degree) : degree_(std::max(degree, 0)) {
    c_.assign(static_cast<std::size_t>((degree_ + 1) * (degree_ + 2) / 2), cplx{});
}

int XYPolynomial::slot(int a, int b) const {
    const int t = a + b;
    return t * (t + 1) / 2 + b;
}

cplx& XYPolynomial::coeff(int a, int b) {
    if (a < 0 || b < 0 || a + b > degree_) throw ShapeError("polynomial: exponent out of range");
    return c_[slot(a, b)];
}

cplx XYPolynomial::coeff(int a, int b) const {
    if (a < 0 || b < 0 || a + b > degree_) return {};
    return c_[slot(a, b)];
}

cplx XYPolynomial::operator()(cplx z) const {
    // Horner in y over Horner in x would need a reshuffle; degrees here are
    // small, so plain power tables are fine.
    std::vector<double> xp(degree_ + 1, 1.0), yp(degree_ + 1, 1.0);
    for (int i = 1; i <= degree_; ++i) {
        xp[i] = xp[i - 1] * z.real();
        yp[i] = yp[i - 1] * z.imag();
    }
    cplx s{};
    for (const auto& [a, b] : exponents(degree_)) s += c_[slot(a, b)] * (xp[a] * yp[b]);
    return s;
}

XYPolynomial XYPolynomial::z_power(int m) {
    XYPolynomial p(m);
    cplx ik{1.0, 0.0};
    for (int k = 0; k <= m; ++k) {
        p.coeff(m - k, k) = binom(m, k) * ik;
        ik *= cplx(0.0, 1.0);
    }
    return p;
}

XYPolynomial XYPolynomial::centred_dzbar(double h) const {
    XYPolynomial out(std::max(degree_ - 1, 0));
    for (const auto& [a, b] : exponents(degree_)) {
        const cplx c = c_[slot(a, b)];
        if (c == cplx{}) continue;
        // ((x+h)^a - (x-h)^a) / 2h = sum_{j odd} C(a,j) h^{j-1} x^{a-j}
        for (int j = 1; j <= a; j += 2) out.coeff(a - j, b) += 0.5 * c * binom(a, j) * std::pow(h, j - 1);
        for (int j = 1; j <= b; j += 2) {
            out.coeff(a, b - j) += cplx(0.0, 0.5) * c * binom(b, j) * std::pow(h, j - 1);
        }
    }
    return out;
}

double XYPolynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const cplx& v : c_) m = std::max(m, std::abs(v));
    return m;
}

XYPolynomial discrete_monomial(int m, double h) {
    if (m < 0) throw ShapeError("discrete_monomial: negative degree");
    XYPolynomial g = XYPolynomial::z_power(m);
    if (m <= 2) return g;
    const XYPolynomial r = g.centred_dzbar(h);

    // Unknown correction p of degree <= m - 1 with centred_dzbar(p) = -r.
    const auto unk = exponents(m - 1);
    const auto eqs = exponents(m - 2);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(eqs.size(), unk.size());
    Eigen::VectorXcd rhs(eqs.size());
    for (std::size_t e = 0; e < eqs.size(); ++e) rhs[e] = -r.coeff(eqs[e].first, eqs[e].second);
    for (std::size_t u = 0; u < unk.size(); ++u) {
        XYPolynomial basis(m - 1);
        basis.coeff(unk[u].first, unk[u].second) = 1.0;
        const XYPolynomial d = basis.centred_dzbar(h);
        for (std::size_t e = 0; e < eqs.size(); ++e) A(e, u) = d.coeff(eqs[e].first, eqs[e].second);
    }
    const Eigen::VectorXcd p = A.completeOrthogonalDecomposition().solve(rhs);
    for (std::size_t u = 0; u < unk.size(); ++u) g.coeff(unk[u].first, unk[u].second) += p[u];
    return g;
}

}  // namespace dbarlab
