#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dbarlab/grid.hpp"

namespace dbarlab {

/// Complex Hessian H_jk = d^2 phi / dz_j dzbar_k. Only the leading n x n
/// block is meaningful.
using Hessian = Eigen::Matrix2cd;

/// Closed-form value, holomorphic gradient (d phi / dz_j) and complex Hessian.
struct WeightEval {
    double value = 0.0;
    CPoint gradient{};
    Hessian hessian = Hessian::Zero();
};

/// User-supplied weight: three callables that must agree with each other.
struct CustomWeight {
    std::string name = "custom";
    std::function<double(const CPoint&)> value;
    std::function<CPoint(const CPoint&)> gradient;
    std::function<Hessian(const CPoint&)> hessian;
    bool strictly_psh = true;
};

/// Catalog of plurisubharmonic weights phi on C^n.
///
///   gaussian(a)              phi = a |z|^2
///   anisotropic-gaussian(a)  phi = sum_j a_j |z_j|^2
///   radial-quartic(c)        phi = c0 + c1 |z|^2 + c2 |z|^4
///   custom                   closed-form callables
///
/// radial-quartic is only strictly plurisubharmonic when c1 > 0; the default
/// coefficients (0, 0, 1) give the degenerate stress case c_phi(0) = 0.
class WeightSpec {
public:
    enum class Kind { gaussian, anisotropic_gaussian, radial_quartic, custom };

    static WeightSpec gaussian(int n, double a);
    static WeightSpec anisotropic_gaussian(std::vector<double> a);
    static WeightSpec radial_quartic(int n, double c0, double c1, double c2);
    static WeightSpec custom(int n, CustomWeight w);

    /// Catalog lookup by name ("gaussian", "anisotropic-gaussian",
    /// "radial-quartic"). Throws ConfigError for unknown kinds or bad params.
    static WeightSpec from_name(std::string_view kind, int n, const std::vector<double>& params);

    int n() const noexcept { return n_; }
    Kind kind() const noexcept { return kind_; }
    std::string name() const;
    const std::vector<double>& params() const noexcept { return params_; }
    bool strictly_psh() const noexcept;

    WeightEval eval(const CPoint& z) const;
    double value(const CPoint& z) const;

private:
    WeightSpec(int n, Kind kind, std::vector<double> params);

    int n_;
    Kind kind_;
    std::vector<double> params_;
    std::shared_ptr<const CustomWeight> custom_;
};

/// eval_weight(w, z). Throws NumericalConsistencyError for non-finite z.
WeightEval eval_weight(const WeightSpec& w, const CPoint& z);

/// Smallest eigenvalue of the leading n x n block of a Hermitian matrix
/// (closed form for n = 2). Throws NumericalConsistencyError when the block
/// is not Hermitian within 1e-12 * ||h||.
double smallest_eigenvalue(const Hessian& h, int n);
double smallest_eigenvalue(const Eigen::MatrixXcd& h);

/// c_phi sampled at every grid point.
struct EigenField {
    Grid grid;
    std::vector<double> values;
};

EigenField eigen_field(const Grid& grid, const WeightSpec& w);

/// chi(t) = s * max(t, 0)^3 with its first two derivatives.
struct CutoffValues {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct ConvexCutoff {
    double scale = 1.0;

    CutoffValues eval(double t) const noexcept;
    double operator()(double t) const noexcept { return eval(t).value; }
    /// The epsilon with chi(epsilon) = level (level > 0).
    double level_for(double level) const;
};

inline CutoffValues cutoff_eval(const ConvexCutoff& c, double t) noexcept { return c.eval(t); }

/// rho(z) = |z - center|^2 - r^2. D = {rho < 0}, D_eps = {rho < eps} is the
/// ball of radius sqrt(r^2 + eps).
struct DefiningFunction {
    int n = 1;
    CPoint center{};
    double radius = 1.0;

    double operator()(const CPoint& z) const noexcept;
    double eps_radius(double eps) const;
};

/// psi_k = phi + k chi(rho).
struct BumpedWeight {
    WeightSpec base;
    DefiningFunction defining;
    ConvexCutoff cutoff;
    double k = 0.0;
};

struct BumpedEval {
    double psi = 0.0;
    /// c_phi(z), used in place of c_{psi_k} >= c_phi.
    double c_lower = 0.0;
};

BumpedEval bumped_eval(const BumpedWeight& b, const CPoint& z);

}  // namespace dbarlab
