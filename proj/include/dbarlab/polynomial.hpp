#pragma once

#include <vector>

#include "dbarlab/grid.hpp"

namespace dbarlab {

/// Polynomial in the real coordinates (x, y) of one complex variable,
/// stored densely over exponents a + b <= degree.
class XYPolynomial {
public:
    explicit XYPolynomial(int degree = 0);

    int degree() const noexcept { return degree_; }
    cplx& coeff(int a, int b);
    cplx coeff(int a, int b) const;
    cplx operator()(cplx z) const;

    /// z^m expanded in x and y.
    static XYPolynomial z_power(int m);

    /// Centred-difference d/dzbar with spacing h, applied exactly to the
    /// polynomial: ((x+h)^a - (x-h)^a) / 2h etc.
    XYPolynomial centred_dzbar(double h) const;

    double max_abs_coeff() const;

private:
    int slot(int a, int b) const;

    int degree_;
    std::vector<cplx> c_;
};

/// Discrete holomorphic monomial g_m = z^m + p, deg p <= m - 2, with
/// centred_dzbar(g_m) == 0 up to rounding. g_m = z^m for m <= 2; the
/// correction is O(h^2) (g_3 = z^3 - h^2 zbar).
XYPolynomial discrete_monomial(int m, double h);

}  // namespace dbarlab
