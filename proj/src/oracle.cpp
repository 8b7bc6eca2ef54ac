#include "dbarlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbarlab/errors.hpp"
#include "dbarlab/solver.hpp"

namespace dbarlab {

namespace {

// Primitive G with d^2 G / dx dy = 1 / w, w = x + i y: G = -i (w log w - w).
// Only evaluated with y >= 0 (imaginary part +0), where the principal log is
// continuous.
cplx primitive(double x, double y) {
    const cplx w(x, y);
    if (w == cplx{}) return {};
    return cplx(0.0, -1.0) * (w * std::log(w) - w);
}

cplx upper_rectangle(double x1, double x2, double y1, double y2) {
    return primitive(x2, y2) - primitive(x1, y2) - primitive(x2, y1) + primitive(x1, y1);
}

// One-sided or centred first-difference weights along an axis of N points.
struct Stencil {
    int offset[3];
    double weight[3];
    int size;
};

Stencil derivative_stencil(int i, int N, double h) {
    const double c = 1.0 / (2.0 * h);
    if (i == 0) return {{0, 1, 2}, {-3.0 * c, 4.0 * c, -1.0 * c}, 3};
    if (i == N - 1) return {{0, -1, -2}, {3.0 * c, -4.0 * c, 1.0 * c}, 3};
    return {{-1, 1, 0}, {-c, c, 0.0}, 2};
}

}  // namespace

cplx rectangle_inverse_integral(double x1, double x2, double y1, double y2) {
    // Split at y = 0; below the axis use 1/w = conj(1/conj(w)).
    cplx total{};
    if (y2 > 0.0) total += upper_rectangle(x1, x2, std::max(y1, 0.0), y2);
    if (y1 < 0.0) total += std::conj(upper_rectangle(x1, x2, std::max(-y2, 0.0), -y1));
    return total;
}

FormField cauchy_transform(const FormField& omega, int margin, int threads) {
    const Grid& g = omega.grid();
    if (g.n() != 1 || omega.degree() != 1) throw ShapeError("cauchy_transform: expects a (0,1)-form in one variable");
    struct Source {
        int ix, iy;
        cplx value;
    };
    std::vector<Source> src;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const cplx v = omega.at(0, p);
        if (v == cplx{}) continue;
        if (g.cells_to_boundary(p) < margin) {
            throw PreconditionError("cauchy_transform: omega reaches within " + std::to_string(margin) +
                                    " cells of the box boundary");
        }
        src.push_back({g.index(p, 0), g.index(p, 1), v});
    }
    const double h = g.h();
    const int N = g.N();
    const int span = 2 * N - 1;
    // Kernel table over index offsets (dx, dy) in [-(N-1), N-1]^2: the exact
    // integral of 1/(z - zeta) over the source cell for |dx|, |dy| <= 1, the
    // midpoint rule elsewhere.
    std::vector<cplx> kernel(static_cast<std::size_t>(span) * span);
    for (int dy = -(N - 1); dy < N; ++dy) {
        for (int dx = -(N - 1); dx < N; ++dx) {
            cplx k;
            if (std::abs(dx) <= 1 && std::abs(dy) <= 1) {
                k = rectangle_inverse_integral((dx - 0.5) * h, (dx + 0.5) * h, (dy - 0.5) * h, (dy + 0.5) * h);
            } else {
                k = h * h / cplx(dx * h, dy * h);
            }
            kernel[static_cast<std::size_t>(dy + N - 1) * span + (dx + N - 1)] = k / std::numbers::pi;
        }
    }
    FormField u(g, 0);
    parallel_for(g.points(), threads, [&](std::size_t p) {
        const int ix = g.index(p, 0);
        const int iy = g.index(p, 1);
        cplx acc{};
        for (const Source& s : src) {
            acc += s.value * kernel[static_cast<std::size_t>(iy - s.iy + N - 1) * span + (ix - s.ix + N - 1)];
        }
        u.at(0, p) = acc;
    });
    return u;
}

DenseSystem::DenseSystem(const Grid& g) : grid(g) {
    if (g.n() != 1) throw OracleError("dense system: only n = 1 grids are supported");
    if (g.points() > 1024) throw OracleError("dense system: at most 1024 unknowns");
    const int N = g.N();
    const auto P = static_cast<Eigen::Index>(g.points());
    matrix = Eigen::MatrixXcd::Zero(P, P);
    for (int iy = 0; iy < N; ++iy) {
        for (int ix = 0; ix < N; ++ix) {
            const Eigen::Index row = ix + static_cast<Eigen::Index>(N) * iy;
            const Stencil sx = derivative_stencil(ix, N, g.h());
            const Stencil sy = derivative_stencil(iy, N, g.h());
            for (int k = 0; k < sx.size; ++k) matrix(row, row + sx.offset[k]) += 0.5 * sx.weight[k];
            for (int k = 0; k < sy.size; ++k) {
                matrix(row, row + static_cast<Eigen::Index>(N) * sy.offset[k]) += cplx(0.0, 0.5) * sy.weight[k];
            }
            if (ix > 0 && ix < N - 1 && iy > 0 && iy < N - 1) interior_rows.push_back(static_cast<std::size_t>(row));
        }
    }
}

Eigen::MatrixXcd DenseSystem::interior_matrix() const {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(interior_rows.size()), matrix.cols());
    for (std::size_t r = 0; r < interior_rows.size(); ++r) out.row(r) = matrix.row(interior_rows[r]);
    return out;
}

DenseSolution dense_min_norm(const FormField& omega, const WeightedMeasure& w_u, const WeightedMeasure& w_d,
                             const DenseOptions& opts) {
    const Grid& g = omega.grid();
    if (omega.degree() != 1) throw OracleError("dense_min_norm: expects a (0,1)-form");
    if (!(w_u.grid() == g) || !(w_d.grid() == g)) throw ShapeError("dense_min_norm: measure grid differs");
    const DenseSystem sys(g);
    const Eigen::MatrixXcd D = sys.interior_matrix();
    const Eigen::Index rows = D.rows();
    const Eigen::Index cols = D.cols();

    Eigen::VectorXd scale(cols);  // W_u^{-1/2}, relative to the smallest weight
    const double lmin = *std::min_element(w_u.log_weights().begin(), w_u.log_weights().end());
    if (!std::isfinite(lmin)) throw OracleError("dense_min_norm: w_u must be strictly positive");
    for (Eigen::Index c = 0; c < cols; ++c) scale[c] = std::exp(-0.5 * (w_u.log_weight(c) - lmin));

    Eigen::VectorXcd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) b[r] = omega.at(0, sys.interior_rows[r]);

    DenseSolution out{FormField(g, 0), 0.0, 0, {}};
    const Eigen::MatrixXcd M = D * scale.asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(M);
    out.rank = cod.rank();
    if (out.rank < rows && !opts.least_squares) {
        throw OracleError("dense_min_norm: constraint matrix is rank deficient (rank " + std::to_string(out.rank) +
                          " < " + std::to_string(rows) + ")");
    }
    if (b.norm() > 0.0) {
        const Eigen::VectorXcd y = cod.solve(b);
        const Eigen::VectorXcd u = scale.asDiagonal() * y;
        for (Eigen::Index c = 0; c < cols; ++c) out.u.at(0, c) = u[c];
        out.residual = (D * u - b).norm() / b.norm();
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(D, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = sv.size() > 0 ? sv[0] * 1e-10 : 0.0;
    Eigen::Index r = 0;
    while (r < sv.size() && sv[r] > tol) ++r;
    for (Eigen::Index k = r; k < cols; ++k) {
        FormField kf(g, 0);
        for (Eigen::Index c = 0; c < cols; ++c) kf.at(0, c) = svd.matrixV()(c, k);
        out.kernel.push_back(std::move(kf));
    }
    return out;
}

FdCheck fd_derivative_check(const WeightSpec& w, const std::vector<CPoint>& points, double step) {
    if (!(step >= 1e-6 && step <= 1e-2)) throw ConfigError("fd_derivative_check: step must lie in [1e-6, 1e-2]");
    const int n = w.n();
    auto shifted = [&](CPoint z, int j, bool imag, double d) {
        z[j] += imag ? cplx(0.0, d) : cplx(d, 0.0);
        return z;
    };
    auto rel = [](cplx fd, cplx exact) { return std::abs(fd - exact) / std::max(1.0, std::abs(exact)); };

    FdCheck out;
    for (const CPoint& z : points) {
        const WeightEval e = w.eval(z);
        for (int j = 0; j < n; ++j) {
            // d/dz_j = (d/dx_j - i d/dy_j) / 2
            const double dx = (w.value(shifted(z, j, false, step)) - w.value(shifted(z, j, false, -step))) / (2 * step);
            const double dy = (w.value(shifted(z, j, true, step)) - w.value(shifted(z, j, true, -step))) / (2 * step);
            out.gradient_error = std::max(out.gradient_error, rel(0.5 * cplx(dx, -dy), e.gradient[j]));
            for (int k = 0; k < n; ++k) {
                // H_jk = d/dz_j (d phi / dzbar_k), with d phi / dzbar_k = conj(d phi / dz_k).
                auto dbar_k = [&](const CPoint& p) { return std::conj(w.eval(p).gradient[k]); };
                const cplx gx = (dbar_k(shifted(z, j, false, step)) - dbar_k(shifted(z, j, false, -step))) / (2 * step);
                const cplx gy = (dbar_k(shifted(z, j, true, step)) - dbar_k(shifted(z, j, true, -step))) / (2 * step);
                const cplx fd = 0.5 * (gx - cplx(0.0, 1.0) * gy);
                out.hessian_error = std::max(out.hessian_error, rel(fd, e.hessian(j, k)));
            }
        }
    }
    return out;
}

}  // namespace dbarlab
