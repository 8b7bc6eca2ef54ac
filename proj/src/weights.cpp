#include "dbarlab/weights.hpp"

#include <cmath>
#include <string>

#include "dbarlab/errors.hpp"

namespace dbarlab {

namespace {

bool finite_point(const CPoint& z, int n) {
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(z[j].real()) || !std::isfinite(z[j].imag())) return false;
    }
    return true;
}

}  // namespace

WeightSpec::WeightSpec(int n, Kind kind, std::vector<double> params)
    : n_(n), kind_(kind), params_(std::move(params)) {
    if (n != 1 && n != 2) throw ConfigError("weight: dimension must be 1 or 2");
}

WeightSpec WeightSpec::gaussian(int n, double a) {
    if (!(a > 0.0)) throw ConfigError("weight gaussian: a must be positive");
    return WeightSpec(n, Kind::gaussian, {a});
}

WeightSpec WeightSpec::anisotropic_gaussian(std::vector<double> a) {
    if (a.empty() || a.size() > 2) {
        throw ConfigError("weight anisotropic-gaussian: need one coefficient per complex dimension");
    }
    for (double v : a) {
        if (!(v > 0.0)) throw ConfigError("weight anisotropic-gaussian: coefficients must be positive");
    }
    const int n = static_cast<int>(a.size());
    return WeightSpec(n, Kind::anisotropic_gaussian, std::move(a));
}

WeightSpec WeightSpec::radial_quartic(int n, double c0, double c1, double c2) {
    if (c1 < 0.0 || c2 < 0.0) {
        throw ConfigError("weight radial-quartic: c1 and c2 must be non-negative");
    }
    return WeightSpec(n, Kind::radial_quartic, {c0, c1, c2});
}

WeightSpec WeightSpec::custom(int n, CustomWeight w) {
    if (!w.value || !w.gradient || !w.hessian) {
        throw ConfigError("weight custom: value, gradient and hessian callables are required");
    }
    WeightSpec s(n, Kind::custom, {});
    s.custom_ = std::make_shared<const CustomWeight>(std::move(w));
    return s;
}

WeightSpec WeightSpec::from_name(std::string_view kind, int n, const std::vector<double>& params) {
    if (kind == "gaussian") {
        if (params.size() != 1) throw ConfigError("weight gaussian: expected parameter a");
        return gaussian(n, params[0]);
    }
    if (kind == "anisotropic-gaussian") {
        if (static_cast<int>(params.size()) != n) {
            throw ConfigError("weight anisotropic-gaussian: expected " + std::to_string(n) + " coefficients");
        }
        return anisotropic_gaussian(params);
    }
    if (kind == "radial-quartic") {
        if (params.size() != 3) throw ConfigError("weight radial-quartic: expected coefficients [c0, c1, c2]");
        return radial_quartic(n, params[0], params[1], params[2]);
    }
    throw ConfigError("weight: unknown catalog kind '" + std::string(kind) + "'");
}

std::string WeightSpec::name() const {
    switch (kind_) {
        case Kind::gaussian: return "gaussian";
        case Kind::anisotropic_gaussian: return "anisotropic-gaussian";
        case Kind::radial_quartic: return "radial-quartic";
        case Kind::custom: return custom_ ? custom_->name : "custom";
    }
    return "unknown";
}

bool WeightSpec::strictly_psh() const noexcept {
    switch (kind_) {
        case Kind::gaussian:
        case Kind::anisotropic_gaussian: return true;
        case Kind::radial_quartic: return params_[1] > 0.0;
        case Kind::custom: return custom_->strictly_psh;
    }
    return false;
}

double WeightSpec::value(const CPoint& z) const {
    switch (kind_) {
        case Kind::gaussian: return params_[0] * norm2(z, n_);
        case Kind::anisotropic_gaussian: {
            double v = 0.0;
            for (int j = 0; j < n_; ++j) v += params_[j] * std::norm(z[j]);
            return v;
        }
        case Kind::radial_quartic: {
            const double r2 = norm2(z, n_);
            return params_[0] + params_[1] * r2 + params_[2] * r2 * r2;
        }
        case Kind::custom: return custom_->value(z);
    }
    return 0.0;
}

WeightEval WeightSpec::eval(const CPoint& z) const {
    WeightEval out;
    out.value = value(z);
    switch (kind_) {
        case Kind::gaussian:
            for (int j = 0; j < n_; ++j) {
                out.gradient[j] = params_[0] * std::conj(z[j]);
                out.hessian(j, j) = params_[0];
            }
            break;
        case Kind::anisotropic_gaussian:
            for (int j = 0; j < n_; ++j) {
                out.gradient[j] = params_[j] * std::conj(z[j]);
                out.hessian(j, j) = params_[j];
            }
            break;
        case Kind::radial_quartic: {
            // d/dz_j = (c1 + 2 c2 r^2) zbar_j,
            // d^2/dz_j dzbar_k = (c1 + 2 c2 r^2) delta_jk + 2 c2 zbar_j z_k.
            const double r2 = norm2(z, n_);
            const double radial = params_[1] + 2.0 * params_[2] * r2;
            for (int j = 0; j < n_; ++j) {
                out.gradient[j] = radial * std::conj(z[j]);
                for (int k = 0; k < n_; ++k) {
                    out.hessian(j, k) = 2.0 * params_[2] * std::conj(z[j]) * z[k];
                }
                out.hessian(j, j) += radial;
            }
            break;
        }
        case Kind::custom:
            out.gradient = custom_->gradient(z);
            out.hessian = custom_->hessian(z);
            break;
    }
    return out;
}

WeightEval eval_weight(const WeightSpec& w, const CPoint& z) {
    if (!finite_point(z, w.n())) throw NumericalConsistencyError("eval_weight: non-finite point");
    return w.eval(z);
}

double smallest_eigenvalue(const Hessian& h, int n) {
    if (n != 1 && n != 2) throw ShapeError("smallest_eigenvalue: n must be 1 or 2");
    const Eigen::MatrixXcd block = h.topLeftCorner(n, n);
    const double scale = block.norm();
    const double defect = (block - block.adjoint()).norm();
    if (defect > 1e-12 * scale) {
        throw NumericalConsistencyError("smallest_eigenvalue: matrix is not Hermitian");
    }
    if (n == 1) return h(0, 0).real();
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double half_gap = 0.5 * (a - d);
    const double off = std::abs(0.5 * (h(0, 1) + std::conj(h(1, 0))));
    return 0.5 * (a + d) - std::hypot(half_gap, off);
}

double smallest_eigenvalue(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols() || h.rows() < 1 || h.rows() > 2) {
        throw ShapeError("smallest_eigenvalue: expected a 1x1 or 2x2 matrix");
    }
    Hessian full = Hessian::Zero();
    full.topLeftCorner(h.rows(), h.cols()) = h;
    return smallest_eigenvalue(full, static_cast<int>(h.rows()));
}

EigenField eigen_field(const Grid& grid, const WeightSpec& w) {
    if (grid.n() != w.n()) throw ShapeError("eigen_field: weight and grid dimensions differ");
    EigenField f{grid, std::vector<double>(grid.points())};
    for (std::size_t p = 0; p < grid.points(); ++p) {
        f.values[p] = smallest_eigenvalue(w.eval(grid.z(p)).hessian, grid.n());
    }
    return f;
}

CutoffValues ConvexCutoff::eval(double t) const noexcept {
    if (t <= 0.0) return {};
    return {scale * t * t * t, 3.0 * scale * t * t, 6.0 * scale * t};
}

double ConvexCutoff::level_for(double level) const {
    if (!(level > 0.0) || !(scale > 0.0)) throw ConfigError("cutoff: level and scale must be positive");
    return std::cbrt(level / scale);
}

double DefiningFunction::operator()(const CPoint& z) const noexcept {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(z[j] - center[j]);
    return s - radius * radius;
}

double DefiningFunction::eps_radius(double eps) const {
    const double r2 = radius * radius + eps;
    if (r2 < 0.0) throw ConfigError("defining function: level set is empty");
    return std::sqrt(r2);
}

BumpedEval bumped_eval(const BumpedWeight& b, const CPoint& z) {
    if (b.k < 0.0) throw ConfigError("bumped weight: k must be non-negative");
    const WeightEval e = b.base.eval(z);
    BumpedEval out;
    out.psi = e.value;
    if (b.k > 0.0) out.psi += b.k * b.cutoff(b.defining(z));
    out.c_lower = smallest_eigenvalue(e.hessian, b.base.n());
    return out;
}

}  // namespace dbarlab
