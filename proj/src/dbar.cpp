#include "dbarlab/dbar.hpp"

#include <string>
#include <vector>

#include "dbarlab/errors.hpp"
#include "dbarlab/measure.hpp"

namespace dbarlab {

using Triplet = Eigen::Triplet<cplx>;

SparseMatrix axis_derivative(const Grid& grid, int axis) {
    const std::size_t P = grid.points();
    const std::size_t s = grid.stride(axis);
    const int N = grid.N();
    const double c = 1.0 / (2.0 * grid.h());
    std::vector<Triplet> t;
    t.reserve(3 * P);
    for (std::size_t p = 0; p < P; ++p) {
        const auto row = static_cast<Eigen::Index>(p);
        const int i = grid.index(p, axis);
        if (i == 0) {
            t.emplace_back(row, p, -3.0 * c);
            t.emplace_back(row, p + s, 4.0 * c);
            t.emplace_back(row, p + 2 * s, -1.0 * c);
        } else if (i == N - 1) {
            t.emplace_back(row, p, 3.0 * c);
            t.emplace_back(row, p - s, -4.0 * c);
            t.emplace_back(row, p - 2 * s, 1.0 * c);
        } else {
            t.emplace_back(row, p - s, -c);
            t.emplace_back(row, p + s, c);
        }
    }
    SparseMatrix m(P, P);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix dzbar(const Grid& grid, int j) {
    SparseMatrix dx = axis_derivative(grid, 2 * j);
    SparseMatrix dy = axis_derivative(grid, 2 * j + 1);
    SparseMatrix out = cplx(0.5, 0.0) * dx + cplx(0.0, 0.5) * dy;
    out.makeCompressed();
    return out;
}

DbarOperator::DbarOperator(Grid grid, int target_degree) : grid_(std::move(grid)), target_(target_degree) {
    const int n = grid_.n();
    if (target_degree < 1 || target_degree > n) {
        throw ShapeError("dbar: target degree " + std::to_string(target_degree) + " not in [1, n]");
    }
    const int q = target_degree;
    const int src_comp = form_components(n, q - 1);
    const int tgt_comp = form_components(n, q);
    const std::size_t P = grid_.points();

    std::vector<SparseMatrix> dz;
    for (int j = 0; j < n; ++j) dz.push_back(dzbar(grid_, j));

    std::vector<Triplet> t;
    for (int tc = 0; tc < tgt_comp; ++tc) {
        const unsigned J = form_multi_index(n, q, tc);
        int pos = 0;
        for (int j = 0; j < n; ++j) {
            if (!(J & (1u << j))) continue;
            const unsigned src = J & ~(1u << j);
            int sc = 0;
            while (sc < src_comp && form_multi_index(n, q - 1, sc) != src) ++sc;
            const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
            ++pos;
            const SparseMatrix& d = dz[j];
            for (Eigen::Index r = 0; r < d.outerSize(); ++r) {
                for (SparseMatrix::InnerIterator it(d, r); it; ++it) {
                    t.emplace_back(tc * P + r, sc * P + it.col(), sign * it.value());
                }
            }
        }
    }
    matrix_.resize(tgt_comp * P, src_comp * P);
    matrix_.setFromTriplets(t.begin(), t.end());
    matrix_.makeCompressed();
}

FormField DbarOperator::apply(const FormField& f) const {
    if (!(f.grid() == grid_) || f.degree() != source_degree()) {
        throw ShapeError("dbar_apply: field degree " + std::to_string(f.degree()) +
                         " does not match operator source degree " + std::to_string(source_degree()));
    }
    FormField out(grid_, target_);
    Eigen::Map<const Eigen::VectorXcd> x(f.data().data(), f.size());
    Eigen::Map<Eigen::VectorXcd> y(out.data().data(), out.size());
    y.noalias() = matrix_ * x;
    return out;
}

FormField DbarOperator::adjoint_apply(const FormField& g, const WeightedMeasure& w_src,
                                      const WeightedMeasure& w_tgt) const {
    if (!(g.grid() == grid_) || g.degree() != target_) {
        throw ShapeError("dbar adjoint: field does not match operator target");
    }
    if (!(w_src.grid() == grid_) || !(w_tgt.grid() == grid_)) {
        throw ShapeError("dbar adjoint: measure grid differs from operator grid");
    }
    // Shift both log weights by one common constant so the ratio is exact.
    const double shift = w_tgt.max_log();
    const std::size_t P = grid_.points();
    Eigen::VectorXcd wg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        wg[i] = g.data()[i] * std::exp(w_tgt.log_weight(i % P) - shift);
    }
    FormField out(grid_, source_degree());
    Eigen::Map<Eigen::VectorXcd> y(out.data().data(), out.size());
    y.noalias() = matrix_.adjoint() * wg;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lw = w_src.log_weight(i % P);
        if (!std::isfinite(lw)) throw PreconditionError("dbar adjoint: source weight must be positive");
        out.data()[i] *= std::exp(shift - lw);
    }
    return out;
}

FormField dbar_apply(const DbarOperator& op, const FormField& f) { return op.apply(f); }

}  // namespace dbarlab
