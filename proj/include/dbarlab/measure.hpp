#pragma once

#include <span>
#include <vector>

#include "dbarlab/grid.hpp"
#include "dbarlab/weights.hpp"

namespace dbarlab {

/// Pointwise weight w(z) >= 0 on a grid, stored as log w so that factors like
/// e^{psi_k} with large k never overflow. log w = -inf encodes w = 0.
/// Quadrature is w(z) h^{2n}; the cell factor is applied by the reductions.
class WeightedMeasure {
public:
    /// w == 1.
    static WeightedMeasure unit(const Grid& grid);
    /// Throws ConfigError on NaN or +inf entries.
    static WeightedMeasure from_log(const Grid& grid, std::vector<double> log_w);
    /// Throws ConfigError on negative or non-finite entries.
    static WeightedMeasure from_values(const Grid& grid, std::span<const double> w);

    const Grid& grid() const noexcept { return grid_; }
    double log_weight(std::size_t p) const noexcept { return log_w_[p]; }
    double weight(std::size_t p) const noexcept;
    std::span<const double> log_weights() const noexcept { return log_w_; }
    /// Largest finite log weight (-inf when w == 0 everywhere).
    double max_log() const noexcept { return max_log_; }
    /// True when every weight is strictly positive.
    bool positive() const noexcept;

    /// Pointwise product with another measure (sum of logs).
    WeightedMeasure times(const WeightedMeasure& o) const;

private:
    WeightedMeasure(Grid grid, std::vector<double> log_w);

    Grid grid_;
    std::vector<double> log_w_;
    double max_log_;
};

/// e^{phi}.
WeightedMeasure exp_weight(const Grid& grid, const WeightSpec& phi);
/// c_phi e^{phi}; zero where c_phi <= 0.
WeightedMeasure c_exp_weight(const Grid& grid, const WeightSpec& phi);
/// e^{psi_k}.
WeightedMeasure exp_bumped(const Grid& grid, const BumpedWeight& b);
/// c_phi e^{psi_k} (c_phi standing in for c_{psi_k}).
WeightedMeasure c_exp_bumped(const Grid& grid, const BumpedWeight& b);

}  // namespace dbarlab
