#include "dbarlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dbarlab/errors.hpp"

namespace dbarlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_zero(double c) { return c > 0.0 ? std::log(c) : kNegInf; }

void require_dim(const Grid& grid, int n, const char* what) {
    if (grid.n() != n) throw ShapeError(std::string(what) + ": weight and grid dimensions differ");
}

}  // namespace

WeightedMeasure::WeightedMeasure(Grid grid, std::vector<double> log_w)
    : grid_(std::move(grid)), log_w_(std::move(log_w)), max_log_(kNegInf) {
    if (log_w_.size() != grid_.points()) throw ShapeError("weighted measure: wrong number of weights");
    for (double v : log_w_) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw ConfigError("weighted measure: weights must be finite and non-negative");
        }
        max_log_ = std::max(max_log_, v);
    }
}

WeightedMeasure WeightedMeasure::unit(const Grid& grid) {
    return WeightedMeasure(grid, std::vector<double>(grid.points(), 0.0));
}

WeightedMeasure WeightedMeasure::from_log(const Grid& grid, std::vector<double> log_w) {
    return WeightedMeasure(grid, std::move(log_w));
}

WeightedMeasure WeightedMeasure::from_values(const Grid& grid, std::span<const double> w) {
    std::vector<double> lw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
            throw ConfigError("weighted measure: weights must be finite and non-negative");
        }
        lw[i] = log_or_zero(w[i]);
    }
    return WeightedMeasure(grid, std::move(lw));
}

double WeightedMeasure::weight(std::size_t p) const noexcept { return std::exp(log_w_[p]); }

bool WeightedMeasure::positive() const noexcept {
    return std::all_of(log_w_.begin(), log_w_.end(), [](double v) { return std::isfinite(v); });
}

WeightedMeasure WeightedMeasure::times(const WeightedMeasure& o) const {
    if (!(grid_ == o.grid_)) throw ShapeError("weighted measure: grids differ");
    std::vector<double> lw(log_w_.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = log_w_[i] + o.log_w_[i];
    return WeightedMeasure(grid_, std::move(lw));
}

WeightedMeasure exp_weight(const Grid& grid, const WeightSpec& phi) {
    require_dim(grid, phi.n(), "exp_weight");
    std::vector<double> lw(grid.points());
    for (std::size_t p = 0; p < lw.size(); ++p) lw[p] = phi.value(grid.z(p));
    return WeightedMeasure::from_log(grid, std::move(lw));
}

WeightedMeasure c_exp_weight(const Grid& grid, const WeightSpec& phi) {
    require_dim(grid, phi.n(), "c_exp_weight");
    std::vector<double> lw(grid.points());
    for (std::size_t p = 0; p < lw.size(); ++p) {
        const WeightEval e = phi.eval(grid.z(p));
        lw[p] = e.value + log_or_zero(smallest_eigenvalue(e.hessian, grid.n()));
    }
    return WeightedMeasure::from_log(grid, std::move(lw));
}

WeightedMeasure exp_bumped(const Grid& grid, const BumpedWeight& b) {
    require_dim(grid, b.base.n(), "exp_bumped");
    std::vector<double> lw(grid.points());
    for (std::size_t p = 0; p < lw.size(); ++p) lw[p] = bumped_eval(b, grid.z(p)).psi;
    return WeightedMeasure::from_log(grid, std::move(lw));
}

WeightedMeasure c_exp_bumped(const Grid& grid, const BumpedWeight& b) {
    require_dim(grid, b.base.n(), "c_exp_bumped");
    std::vector<double> lw(grid.points());
    for (std::size_t p = 0; p < lw.size(); ++p) {
        const BumpedEval e = bumped_eval(b, grid.z(p));
        lw[p] = e.psi + log_or_zero(e.c_lower);
    }
    return WeightedMeasure::from_log(grid, std::move(lw));
}

}  // namespace dbarlab
