#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dbarlab/form_field.hpp"
#include "dbarlab/measure.hpp"
#include "dbarlab/weights.hpp"

namespace dbarlab {

/// Solid Cauchy transform u(z) = (1/pi) int omega(zeta) / (z - zeta) dm(zeta)
/// of a (0,1)-form in one variable, so that du/dzbar = omega. The kernel is
/// integrated exactly over the 3x3 cells around the singularity, midpoint
/// rule elsewhere. omega must vanish within `margin` cells of the faces.
FormField cauchy_transform(const FormField& omega, int margin = 10, int threads = 1);

/// Exact int over [x1,x2]x[y1,y2] of 1/(x + i y) dx dy.
cplx rectangle_inverse_integral(double x1, double x2, double y1, double y2);

/// Independent dense construction of the n = 1 dbar (0 -> 1) on a tiny grid.
struct DenseSystem {
    Grid grid;
    /// All rows (one per point) x all columns.
    Eigen::MatrixXcd matrix;
    /// Flat point indices of the interior rows (margin 1).
    std::vector<std::size_t> interior_rows;

    /// Throws OracleError for n != 1 or more than 1024 points.
    explicit DenseSystem(const Grid& grid);

    Eigen::MatrixXcd interior_matrix() const;
};

struct DenseOptions {
    /// Accept a rank-deficient constraint matrix (least-squares answer).
    bool least_squares = false;
};

struct DenseSolution {
    FormField u;
    /// ||D_I u - omega_I|| / ||omega_I|| (Euclidean, interior rows).
    double residual = 0.0;
    long rank = 0;
    /// Basis of the kernel of D_I (unweighted), one field per vector.
    std::vector<FormField> kernel;
};

/// Minimal ||u||_{w_u} solution of D_I u = omega_I by a complete orthogonal
/// decomposition of D_I W_u^{-1/2}. w_d only enters through the reported
/// residual's row set (all interior rows carry data).
DenseSolution dense_min_norm(const FormField& omega, const WeightedMeasure& w_u, const WeightedMeasure& w_d,
                             const DenseOptions& opts = {});

struct FdCheck {
    double gradient_error = 0.0;
    double hessian_error = 0.0;
    double max_error() const noexcept { return gradient_error > hessian_error ? gradient_error : hessian_error; }
};

/// Central differences of the value against the closed-form gradient, and of
/// the gradient against the closed-form Hessian. Errors are relative with a
/// unit floor: |fd - exact| / max(1, |exact|). step must lie in [1e-6, 1e-2].
FdCheck fd_derivative_check(const WeightSpec& w, const std::vector<CPoint>& points, double step);

}  // namespace dbarlab
