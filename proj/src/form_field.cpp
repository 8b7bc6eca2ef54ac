#include "dbarlab/form_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbarlab/errors.hpp"

namespace dbarlab {

int form_components(int n, int q) {
    if (q < 0 || q > n) return 0;
    if (q == 0 || q == n) return 1;
    return n;  // n = 2, q = 1
}

unsigned form_multi_index(int n, int q, int c) {
    if (q == 0) return 0u;
    if (q == n && n == 2) return 0b11u;
    return 1u << c;
}

FormField::FormField(Grid grid, int degree)
    : grid_(std::move(grid)), degree_(degree), components_(form_components(grid_.n(), degree)) {
    if (degree < 0 || degree > grid_.n()) {
        throw ShapeError("form field: degree " + std::to_string(degree) + " not in [0, n]");
    }
    data_.assign(static_cast<std::size_t>(components_) * grid_.points(), cplx{});
}

FormField FormField::from_function(const Grid& grid, int degree,
                                   const std::function<cplx(int, const CPoint&)>& f) {
    FormField out(grid, degree);
    for (std::size_t p = 0; p < grid.points(); ++p) {
        const CPoint z = grid.z(p);
        for (int c = 0; c < out.components(); ++c) out.at(c, p) = f(c, z);
    }
    return out;
}

std::span<cplx> FormField::component(int c) noexcept {
    return std::span<cplx>(data_).subspan(c * grid_.points(), grid_.points());
}

std::span<const cplx> FormField::component(int c) const noexcept {
    return std::span<const cplx>(data_).subspan(c * grid_.points(), grid_.points());
}

double FormField::max_abs() const noexcept {
    double m = 0.0;
    for (const cplx& v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool FormField::is_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) { return v == cplx{}; });
}

bool FormField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

void FormField::require_same_shape(const FormField& o, const char* what) const {
    if (!(grid_ == o.grid_) || degree_ != o.degree_) {
        throw ShapeError(std::string(what) + ": fields differ in grid or degree");
    }
}

FormField& FormField::operator+=(const FormField& o) {
    require_same_shape(o, "field +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

FormField& FormField::operator-=(const FormField& o) {
    require_same_shape(o, "field -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

FormField& FormField::operator*=(cplx s) noexcept {
    for (cplx& v : data_) v *= s;
    return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(cplx s, FormField a) { return a *= s; }

FormField multiply_pointwise(std::span<const double> chi, FormField f) {
    if (chi.size() != f.grid().points()) throw ShapeError("multiply_pointwise: scalar field has wrong length");
    for (int c = 0; c < f.components(); ++c) {
        auto comp = f.component(c);
        for (std::size_t p = 0; p < comp.size(); ++p) comp[p] *= chi[p];
    }
    return f;
}

}  // namespace dbarlab
