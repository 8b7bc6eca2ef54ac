#pragma once

#include <Eigen/SparseCore>

#include "dbarlab/form_field.hpp"

namespace dbarlab {

class WeightedMeasure;

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Discrete dbar from (0,q-1)-forms to (0,q)-forms.
///
/// d/dzbar_j = (d/dx_j + i d/dy_j) / 2 with centred differences in the
/// interior and second-order one-sided differences on the box faces. For a
/// target multi-index J the component is
///   (dbar f)_J = sum_{j in J} (-1)^{pos(j, J)} d/dzbar_j f_{J \ j},
/// which for n = 2, q = 2 reads d/dzbar_1 f_2 - d/dzbar_2 f_1.
class DbarOperator {
public:
    /// Throws ShapeError unless 1 <= target_degree <= n.
    DbarOperator(Grid grid, int target_degree);

    const Grid& grid() const noexcept { return grid_; }
    int source_degree() const noexcept { return target_ - 1; }
    int target_degree() const noexcept { return target_; }

    /// Rows: target components x points; columns: source components x points.
    const SparseMatrix& matrix() const noexcept { return matrix_; }

    FormField apply(const FormField& f) const;

    /// Adjoint under the weighted inner products: W_src^{-1} D^H W_tgt g.
    FormField adjoint_apply(const FormField& g, const WeightedMeasure& w_src,
                            const WeightedMeasure& w_tgt) const;

private:
    Grid grid_;
    int target_;
    SparseMatrix matrix_;
};

FormField dbar_apply(const DbarOperator& op, const FormField& f);

/// First-derivative matrix along one real axis (N^{2n} square), centred in
/// the interior and one-sided on the faces.
SparseMatrix axis_derivative(const Grid& grid, int axis);

/// d/dzbar_j as a points x points matrix (j zero-based).
SparseMatrix dzbar(const Grid& grid, int j);

}  // namespace dbarlab
