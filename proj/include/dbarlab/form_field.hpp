#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dbarlab/grid.hpp"

namespace dbarlab {

/// Number of (0,q) components in C^n: binomial(n, q).
int form_components(int n, int q);

/// Antiholomorphic multi-index of component c of a (0,q)-form, as a bitmask
/// over {dzbar_1, ..., dzbar_n}. Components are ordered lexicographically:
/// q=1 -> {1}, {2}; q=2 -> {1,2}.
unsigned form_multi_index(int n, int q, int c);

/// Component arrays of a (0,q)-form sampled on a Grid. Storage is
/// component-major: data()[c * points + p].
class FormField {
public:
    /// Zero field. Throws ShapeError unless 0 <= q <= n.
    FormField(Grid grid, int degree);

    static FormField from_function(const Grid& grid, int degree,
                                   const std::function<cplx(int component, const CPoint& z)>& f);

    const Grid& grid() const noexcept { return grid_; }
    int degree() const noexcept { return degree_; }
    int components() const noexcept { return components_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<cplx> component(int c) noexcept;
    std::span<const cplx> component(int c) const noexcept;

    cplx& at(int c, std::size_t p) noexcept { return data_[c * grid_.points() + p]; }
    const cplx& at(int c, std::size_t p) const noexcept { return data_[c * grid_.points() + p]; }

    double max_abs() const noexcept;
    bool is_zero() const noexcept;
    bool all_finite() const noexcept;

    FormField& operator+=(const FormField& o);
    FormField& operator-=(const FormField& o);
    FormField& operator*=(cplx s) noexcept;

    /// Throws ShapeError when grid or degree differ.
    void require_same_shape(const FormField& o, const char* what) const;

private:
    Grid grid_;
    int degree_;
    int components_;
    std::vector<cplx> data_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(cplx s, FormField a);

/// Pointwise product with a real scalar field (one value per grid point).
FormField multiply_pointwise(std::span<const double> chi, FormField f);

}  // namespace dbarlab
