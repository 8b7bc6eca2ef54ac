#include "dbarlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dbarlab/errors.hpp"
#include "dbarlab/polynomial.hpp"
#include "dbarlab/summation.hpp"

namespace dbarlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw ShapeError(std::string(what) + ": grids differ");
}

}  // namespace

RegionMask::RegionMask(Grid grid, std::vector<std::uint8_t> inside)
    : grid_(std::move(grid)), inside_(std::move(inside)) {
    if (inside_.size() != grid_.points()) throw ShapeError("region mask: wrong length");
}

RegionMask RegionMask::all(const Grid& grid) { return {grid, std::vector<std::uint8_t>(grid.points(), 1)}; }

RegionMask RegionMask::none(const Grid& grid) { return {grid, std::vector<std::uint8_t>(grid.points(), 0)}; }

RegionMask RegionMask::ball(const Grid& grid, const CPoint& center, double radius) {
    std::vector<std::uint8_t> in(grid.points());
    const double r2 = radius * radius;
    for (std::size_t p = 0; p < in.size(); ++p) {
        const CPoint z = grid.z(p);
        double d = 0.0;
        for (int j = 0; j < grid.n(); ++j) d += std::norm(z[j] - center[j]);
        in[p] = d < r2;
    }
    return {grid, std::move(in)};
}

RegionMask RegionMask::sublevel(const Grid& grid, const DefiningFunction& rho, double level) {
    std::vector<std::uint8_t> in(grid.points());
    for (std::size_t p = 0; p < in.size(); ++p) in[p] = rho(grid.z(p)) < level;
    return {grid, std::move(in)};
}

RegionMask RegionMask::interior(const Grid& grid, int margin) {
    std::vector<std::uint8_t> in(grid.points());
    for (std::size_t p = 0; p < in.size(); ++p) in[p] = grid.interior(p, margin);
    return {grid, std::move(in)};
}

std::size_t RegionMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), std::uint8_t{1}));
}

RegionMask RegionMask::complement() const {
    std::vector<std::uint8_t> in(inside_.size());
    for (std::size_t p = 0; p < in.size(); ++p) in[p] = !inside_[p];
    return {grid_, std::move(in)};
}

RegionMask RegionMask::intersect(const RegionMask& o) const {
    require_grid(grid_, o.grid_, "region mask intersect");
    std::vector<std::uint8_t> in(inside_.size());
    for (std::size_t p = 0; p < in.size(); ++p) in[p] = inside_[p] && o.inside_[p];
    return {grid_, std::move(in)};
}

RegionMask RegionMask::unite(const RegionMask& o) const {
    require_grid(grid_, o.grid_, "region mask unite");
    std::vector<std::uint8_t> in(inside_.size());
    for (std::size_t p = 0; p < in.size(); ++p) in[p] = inside_[p] || o.inside_[p];
    return {grid_, std::move(in)};
}

RegionMask RegionMask::stencil_closed() const {
    std::vector<std::uint8_t> in(inside_.size(), 0);
    for (std::size_t p = 0; p < in.size(); ++p) {
        if (!inside_[p] || !grid_.interior(p, 1)) continue;
        bool ok = true;
        for (int a = 0; a < grid_.axes() && ok; ++a) {
            const std::size_t s = grid_.stride(a);
            ok = inside_[p - s] && inside_[p + s];
        }
        in[p] = ok;
    }
    return {grid_, std::move(in)};
}

int RegionMask::min_boundary_distance() const {
    int m = grid_.N();
    for (std::size_t p = 0; p < inside_.size(); ++p) {
        if (inside_[p]) m = std::min(m, grid_.cells_to_boundary(p));
    }
    return m;
}

double log_weighted_mass(const FormField& f, const WeightedMeasure& w, const RegionMask* mask) {
    require_grid(f.grid(), w.grid(), "weighted mass");
    if (mask) require_grid(f.grid(), mask->grid(), "weighted mass");
    const std::size_t P = f.grid().points();
    // Work with log(|f|^2 w) so that huge weights on tiny values never overflow.
    auto term_log = [&](int c, std::size_t p) {
        const double a = std::abs(f.at(c, p));
        const double lw = w.log_weight(p);
        if (a == 0.0 || lw == kNegInf) return kNegInf;
        return 2.0 * std::log(a) + lw;
    };
    double shift = kNegInf;
    for (int c = 0; c < f.components(); ++c) {
        for (std::size_t p = 0; p < P; ++p) {
            if (mask && !mask->contains(p)) continue;
            shift = std::max(shift, term_log(c, p));
        }
    }
    if (shift == kNegInf) return kNegInf;
    CompensatedSum s;
    for (std::size_t p = 0; p < P; ++p) {
        if (mask && !mask->contains(p)) continue;
        for (int c = 0; c < f.components(); ++c) {
            const double t = term_log(c, p);
            if (t != kNegInf) s.add(std::exp(t - shift));
        }
    }
    return shift + std::log(s.value()) + std::log(f.grid().cell_measure());
}

double weighted_norm(const FormField& f, const WeightedMeasure& w) {
    const double l = log_weighted_mass(f, w);
    return l == kNegInf ? 0.0 : std::exp(0.5 * l);
}

double tail_mass(const FormField& f, const RegionMask& mask, const WeightedMeasure& w) {
    const double l = log_weighted_mass(f, w, &mask);
    return l == kNegInf ? 0.0 : std::exp(l);
}

cplx weighted_inner(const FormField& f, const FormField& g, const WeightedMeasure& w) {
    f.require_same_shape(g, "weighted inner product");
    require_grid(f.grid(), w.grid(), "weighted inner product");
    const double shift = w.max_log();
    if (shift == kNegInf) return {};
    const std::size_t P = f.grid().points();
    CompensatedComplexSum s;
    for (std::size_t p = 0; p < P; ++p) {
        const double wp = std::exp(w.log_weight(p) - shift);
        for (int c = 0; c < f.components(); ++c) s.add(f.at(c, p) * std::conj(g.at(c, p)) * wp);
    }
    return s.value() * std::exp(shift) * f.grid().cell_measure();
}

cplx bilinear_pairing(const FormField& f, const std::vector<cplx>& g) {
    const std::size_t P = f.grid().points();
    if (g.size() != P) throw ShapeError("bilinear pairing: test field has wrong length");
    CompensatedComplexSum s;
    for (std::size_t p = 0; p < P; ++p) {
        for (int c = 0; c < f.components(); ++c) s.add(f.at(c, p) * g[p]);
    }
    return s.value() * f.grid().cell_measure();
}

cplx wedge_pairing(const FormField& a, const FormField& b) {
    const Grid& g = a.grid();
    require_grid(g, b.grid(), "wedge pairing");
    if (a.degree() + b.degree() != g.n()) throw ShapeError("wedge pairing: degrees must add up to n");
    const std::size_t P = g.points();
    CompensatedComplexSum s;
    for (std::size_t p = 0; p < P; ++p) {
        if (a.components() == 2) {
            // (a1 dzbar1 + a2 dzbar2) ^ (b1 dzbar1 + b2 dzbar2) = (a1 b2 - a2 b1) dzbar1 ^ dzbar2
            s.add(a.at(0, p) * b.at(1, p) - a.at(1, p) * b.at(0, p));
        } else {
            s.add(a.at(0, p) * b.at(0, p));
        }
    }
    return s.value() * g.cell_measure();
}

double max_abs_on(const FormField& f, const RegionMask& mask) {
    require_grid(f.grid(), mask.grid(), "max_abs_on");
    double m = 0.0;
    for (std::size_t p = 0; p < f.grid().points(); ++p) {
        if (!mask.contains(p)) continue;
        for (int c = 0; c < f.components(); ++c) m = std::max(m, std::abs(f.at(c, p)));
    }
    return m;
}

double max_abs_interior(const FormField& f, int margin) {
    double m = 0.0;
    for (std::size_t p = 0; p < f.grid().points(); ++p) {
        if (!f.grid().interior(p, margin)) continue;
        for (int c = 0; c < f.components(); ++c) m = std::max(m, std::abs(f.at(c, p)));
    }
    return m;
}

std::vector<MomentPairing> moment_orthogonality(const FormField& omega, int max_degree, const MomentOptions& opts) {
    const Grid& g = omega.grid();
    const int n = g.n();
    if (omega.degree() != n) throw ShapeError("moment_orthogonality: omega must have top degree q = n");
    if (max_degree < 0) throw ConfigError("moment_orthogonality: max degree must be non-negative");

    std::vector<XYPolynomial> mono;
    for (int m = 0; m <= max_degree; ++m) {
        mono.push_back(opts.discrete ? discrete_monomial(m, g.h()) : XYPolynomial::z_power(m));
    }
    // Values of g_m(z_j) at every point, per coordinate.
    const std::size_t P = g.points();
    std::vector<std::vector<cplx>> vals(n, std::vector<cplx>(P * (max_degree + 1)));
    for (std::size_t p = 0; p < P; ++p) {
        const CPoint z = g.z(p);
        for (int j = 0; j < n; ++j) {
            for (int m = 0; m <= max_degree; ++m) vals[j][p * (max_degree + 1) + m] = mono[m](z[j]);
        }
    }
    const double norm = weighted_norm(omega, WeightedMeasure::unit(g));

    std::vector<MomentPairing> out;
    std::vector<cplx> test(P);
    for (int t = 0; t <= max_degree; ++t) {
        for (int b = 0; b <= (n == 2 ? t : 0); ++b) {
            const int a = t - b;
            for (std::size_t p = 0; p < P; ++p) {
                cplx v = vals[0][p * (max_degree + 1) + a];
                if (n == 2) v *= vals[1][p * (max_degree + 1) + b];
                test[p] = v;
            }
            MomentPairing mp;
            mp.a = a;
            mp.b = b;
            mp.value = bilinear_pairing(omega, test);
            mp.scale = norm * std::pow(g.R(), t);
            out.push_back(mp);
        }
    }
    return out;
}

double max_moment_defect(const std::vector<MomentPairing>& m) {
    double d = 0.0;
    for (const MomentPairing& mp : m) {
        if (mp.scale > 0.0) d = std::max(d, std::abs(mp.value) / mp.scale);
    }
    return d;
}

FormField exact_form_data(const FormField& v, const DbarOperator& op, int margin) {
    if (!(v.grid() == op.grid()) || v.degree() != op.source_degree()) {
        throw ShapeError("exact_form_data: field does not match operator source");
    }
    const Grid& g = v.grid();
    for (std::size_t p = 0; p < g.points(); ++p) {
        if (g.cells_to_boundary(p) >= margin) continue;
        for (int c = 0; c < v.components(); ++c) {
            if (v.at(c, p) != cplx{}) {
                throw DataGenerationError("exact_form_data: support of v reaches within " + std::to_string(margin) +
                                          " cells of the box boundary");
            }
        }
    }
    return op.apply(v);
}

}  // namespace dbarlab
