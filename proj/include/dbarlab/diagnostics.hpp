#pragma once

#include <cstdint>
#include <vector>

#include "dbarlab/dbar.hpp"
#include "dbarlab/form_field.hpp"
#include "dbarlab/measure.hpp"
#include "dbarlab/weights.hpp"

namespace dbarlab {

/// Per-point predicate on a grid.
class RegionMask {
public:
    RegionMask(Grid grid, std::vector<std::uint8_t> inside);

    static RegionMask all(const Grid& grid);
    static RegionMask none(const Grid& grid);
    /// |z - center| < radius.
    static RegionMask ball(const Grid& grid, const CPoint& center, double radius);
    /// rho(z) < level, i.e. D_level for the defining function.
    static RegionMask sublevel(const Grid& grid, const DefiningFunction& rho, double level);
    /// Points at least `margin` cells from every face.
    static RegionMask interior(const Grid& grid, int margin = 1);

    const Grid& grid() const noexcept { return grid_; }
    bool contains(std::size_t p) const noexcept { return inside_[p] != 0; }
    std::size_t count() const noexcept;
    const std::vector<std::uint8_t>& values() const noexcept { return inside_; }

    RegionMask complement() const;
    RegionMask intersect(const RegionMask& o) const;
    RegionMask unite(const RegionMask& o) const;

    /// Interior points (margin 1) whose +-1 neighbours along every axis lie
    /// in this mask: the rows on which a centred stencil only reads the mask.
    RegionMask stencil_closed() const;

    /// Smallest cells_to_boundary over the mask (N when empty).
    int min_boundary_distance() const;

private:
    Grid grid_;
    std::vector<std::uint8_t> inside_;
};

/// log of sum_{masked points, components} |f|^2 w h^{2n}; -inf when zero.
/// Summation is max-shifted and compensated, in point order.
double log_weighted_mass(const FormField& f, const WeightedMeasure& w, const RegionMask* mask = nullptr);

/// sqrt(sum |f|^2 w h^{2n}).
double weighted_norm(const FormField& f, const WeightedMeasure& w);

/// sum over masked points of |f|^2 w h^{2n}.
double tail_mass(const FormField& f, const RegionMask& mask, const WeightedMeasure& w);

/// <f, g>_w = sum f conj(g) w h^{2n}, componentwise.
cplx weighted_inner(const FormField& f, const FormField& g, const WeightedMeasure& w);

/// Bilinear pairing sum f g h^{2n} of a (0,q)-form with a scalar field,
/// summed over components (used for q = n, one component).
cplx bilinear_pairing(const FormField& f, const std::vector<cplx>& g);

/// Wedge pairing sum (a ^ b) h^{2n} of a (0,p)- and a (0,n-p)-form, the top
/// coefficient of a ^ b summed over the grid. Summation by parts gives
/// B(v, dbar t) = (-1)^q B(dbar v, t) for compactly supported t.
cplx wedge_pairing(const FormField& a, const FormField& b);

/// Largest |f| over the mask.
double max_abs_on(const FormField& f, const RegionMask& mask);

/// Largest |f| over points with cells_to_boundary >= margin.
double max_abs_interior(const FormField& f, int margin = 1);

struct MomentPairing {
    int a = 0;  ///< exponent of z_1
    int b = 0;  ///< exponent of z_2 (0 when n = 1)
    cplx value{};
    /// ||omega||_{L^2} R^{a+b}, the natural scale of the pairing.
    double scale = 0.0;
};

struct MomentOptions {
    /// Pair against the discrete holomorphic monomials (kernel of the centred
    /// stencil) instead of raw z^m. Raw monomials carry an O(h^2) defect.
    bool discrete = true;
};

/// Pairings of a top-degree form omega with the holomorphic monomials of total
/// degree <= max_degree: sum omega(z) g_alpha(z) h^{2n}. The pairing is the
/// bilinear one between (0,n)- and (n,0)-forms.
std::vector<MomentPairing> moment_orthogonality(const FormField& omega, int max_degree,
                                                const MomentOptions& opts = {});

/// max |pairing| / scale over the moments (0 for omega == 0).
double max_moment_defect(const std::vector<MomentPairing>& m);

/// omega = dbar v after checking v vanishes within `margin` cells of the box
/// faces. Throws DataGenerationError otherwise.
FormField exact_form_data(const FormField& v, const DbarOperator& op, int margin = 10);

}  // namespace dbarlab
