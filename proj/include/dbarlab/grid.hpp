#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace dbarlab {

using cplx = std::complex<double>;

/// A point of C^n, n <= 2. Unused coordinates are zero.
using CPoint = std::array<cplx, 2>;

/// Cell-centred sampling of the box [-R, R]^{2n} in C^n.
///
/// Real axes are ordered (x1, y1, x2, y2) and the flat point index runs with
/// x1 fastest: p = i_x1 + N * (i_y1 + N * (i_x2 + N * i_y2)).
class Grid {
public:
    /// Throws ConfigError unless n in {1, 2}, R > 0 and N even with N >= 8.
    Grid(int n, double R, int N);

    int n() const noexcept { return n_; }
    double R() const noexcept { return R_; }
    int N() const noexcept { return N_; }
    double h() const noexcept { return h_; }

    /// Number of real axes, 2n.
    int axes() const noexcept { return 2 * n_; }
    std::size_t points() const noexcept { return points_; }
    /// Lebesgue measure of one cell, h^{2n}.
    double cell_measure() const noexcept { return cell_; }

    double coord(int i) const noexcept { return -R_ + (i + 0.5) * h_; }
    std::size_t stride(int axis) const noexcept { return strides_[axis]; }
    int index(std::size_t p, int axis) const noexcept {
        return static_cast<int>((p / strides_[axis]) % static_cast<std::size_t>(N_));
    }
    std::array<int, 4> multi_index(std::size_t p) const noexcept;
    CPoint z(std::size_t p) const noexcept;

    /// True when every axis index lies in [margin, N - 1 - margin].
    bool interior(std::size_t p, int margin = 1) const noexcept;
    /// Smallest distance (in cells) from p to a box face: min over axes of
    /// min(i, N - 1 - i).
    int cells_to_boundary(std::size_t p) const noexcept;

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.n_ == b.n_ && a.R_ == b.R_ && a.N_ == b.N_;
    }

private:
    int n_;
    double R_;
    int N_;
    double h_;
    double cell_;
    std::size_t points_;
    std::array<std::size_t, 4> strides_{};
};

/// build_grid(n, R, N).
inline Grid build_grid(int n, double R, int N) { return Grid(n, R, N); }

/// |z|^2 summed over the first n coordinates.
inline double norm2(const CPoint& z, int n) noexcept {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(z[j]);
    return s;
}

}  // namespace dbarlab
