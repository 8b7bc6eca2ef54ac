#include <gtest/gtest.h>

#include "dbarlab/errors.hpp"
#include "dbarlab/form_field.hpp"
#include "dbarlab/grid.hpp"

using namespace dbarlab;

TEST(Grid, Geometry) {
    const Grid g(2, 2.0, 8);
    EXPECT_EQ(g.points(), 4096u);
    EXPECT_DOUBLE_EQ(g.h(), 0.5);
    EXPECT_DOUBLE_EQ(g.cell_measure(), 0.0625);
    EXPECT_DOUBLE_EQ(g.coord(0), -1.75);
    EXPECT_DOUBLE_EQ(g.coord(7), 1.75);
    // x1 fastest.
    const std::size_t p = 1 + 8 * (2 + 8 * (3 + 8 * 4));
    EXPECT_EQ(g.multi_index(p), (std::array<int, 4>{1, 2, 3, 4}));
    EXPECT_EQ(g.z(p)[0], cplx(g.coord(1), g.coord(2)));
    EXPECT_EQ(g.z(p)[1], cplx(g.coord(3), g.coord(4)));
    EXPECT_EQ(g.cells_to_boundary(p), 1);
    EXPECT_TRUE(g.interior(p, 1));
    EXPECT_FALSE(g.interior(p, 2));
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(Grid(3, 1.0, 8), ConfigError);
    EXPECT_THROW(Grid(1, 0.0, 8), ConfigError);
    EXPECT_THROW(Grid(1, 1.0, 7), ConfigError);
    EXPECT_THROW(Grid(1, 1.0, 6), ConfigError);
}

TEST(FormField, ComponentsAndMultiIndices) {
    EXPECT_EQ(form_components(2, 0), 1);
    EXPECT_EQ(form_components(2, 1), 2);
    EXPECT_EQ(form_components(2, 2), 1);
    EXPECT_EQ(form_multi_index(2, 1, 0), 1u);
    EXPECT_EQ(form_multi_index(2, 1, 1), 2u);
    EXPECT_EQ(form_multi_index(2, 2, 0), 3u);
    EXPECT_THROW(FormField(Grid(1, 1.0, 8), 2), ShapeError);
}

TEST(FormField, Arithmetic) {
    const Grid g(1, 1.0, 8);
    const FormField a = FormField::from_function(g, 1, [](int, const CPoint& z) { return z[0]; });
    FormField b = cplx(0.0, 2.0) * a;
    b -= a;
    EXPECT_EQ(b.at(0, 9), cplx(-1.0, 2.0) * a.at(0, 9));
    EXPECT_FALSE(b.is_zero());
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_DOUBLE_EQ(a.max_abs(), std::abs(cplx(g.coord(0), g.coord(0))));
    EXPECT_THROW(a + FormField(Grid(1, 1.0, 10), 1), ShapeError);
    EXPECT_THROW(a + FormField(g, 0), ShapeError);
    std::vector<double> half(g.points(), 0.5);
    EXPECT_EQ(multiply_pointwise(half, a).at(0, 3), 0.5 * a.at(0, 3));
}
