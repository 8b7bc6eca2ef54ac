#include "dbarlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbarlab/errors.hpp"

namespace dbarlab {

Grid::Grid(int n, double R, int N) : n_(n), R_(R), N_(N) {
    if (n != 1 && n != 2) {
        throw ConfigError("grid: complex dimension must be 1 or 2, got " + std::to_string(n));
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw ConfigError("grid: half-width R must be positive and finite");
    }
    if (N < 8 || N % 2 != 0) {
        throw ConfigError("grid: N must be even and >= 8, got " + std::to_string(N));
    }
    h_ = 2.0 * R / N;
    cell_ = std::pow(h_, 2 * n);
    std::size_t s = 1;
    for (int a = 0; a < 4; ++a) {
        strides_[a] = s;
        if (a < 2 * n) s *= static_cast<std::size_t>(N);
    }
    points_ = s;
}

std::array<int, 4> Grid::multi_index(std::size_t p) const noexcept {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int a = 0; a < axes(); ++a) idx[a] = index(p, a);
    return idx;
}

CPoint Grid::z(std::size_t p) const noexcept {
    CPoint out{cplx{}, cplx{}};
    for (int j = 0; j < n_; ++j) {
        out[j] = cplx(coord(index(p, 2 * j)), coord(index(p, 2 * j + 1)));
    }
    return out;
}

bool Grid::interior(std::size_t p, int margin) const noexcept {
    return cells_to_boundary(p) >= margin;
}

int Grid::cells_to_boundary(std::size_t p) const noexcept {
    int m = N_;
    for (int a = 0; a < axes(); ++a) {
        const int i = index(p, a);
        m = std::min({m, i, N_ - 1 - i});
    }
    return m;
}

}  // namespace dbarlab
