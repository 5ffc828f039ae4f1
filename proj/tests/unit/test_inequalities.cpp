#include <gtest/gtest.h>

#include <vector>

#include "dimred/inequalities.hpp"
#include "dimred/random.hpp"

using namespace dimred;

TEST(SumPower, RandomInstancesHold) {
    Rng rng(1);
    for (int rep = 0; rep < 2000; ++rep) {
        const double p = rng.uniform(1.0, 5.0);
        const double eps = rng.uniform(0.01, 2.0);
        std::vector<double> ys(1 + rng.below(4));
        for (auto& y : ys) y = rng.uniform(0.0, 3.0);
        EXPECT_TRUE(sum_power_sides(rng.uniform(0.0, 3.0), ys, eps, p).holds());
    }
}

TEST(SumPower, LinearCaseIsExact) {
    const std::vector<double> ys{1.0, 2.0};
    const auto s = sum_power_sides(3.0, ys, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(s.lhs, 6.0);
    EXPECT_DOUBLE_EQ(s.rhs, 6.0);
}

TEST(RelaxedTriangle, RandomInstancesHold) {
    Rng rng(2);
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<double> u(3), v(3), w(3);
        for (auto* pt : {&u, &v, &w})
            for (auto& c : *pt) c = rng.normal();
        const double p = rng.uniform(1.0, 5.0);
        const double eps = rng.uniform(0.01, 2.0);
        EXPECT_TRUE(relaxed_triangle_sides(u, v, w, eps, p).holds());
        EXPECT_TRUE(squared_triangle_sides(u, v, w).holds());
    }
}

TEST(RelaxedTriangle, CollinearEqualityCase) {
    const std::vector<double> u{0.0}, v{1.0}, w{2.0};
    const auto s = relaxed_triangle_sides(u, v, w, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(s.lhs, 8.0);
    EXPECT_DOUBLE_EQ(s.rhs, 8.0);
    EXPECT_TRUE(s.holds());
}

TEST(RelaxedTriangle, LinearCoefficientFailsForCubes) {
    const std::vector<double> u{0.0}, v{1.0}, w{2.0};
    const auto s = relaxed_triangle_literal_sides(u, v, w, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(s.lhs, 8.0);
    EXPECT_DOUBLE_EQ(s.rhs, 6.0);
    EXPECT_FALSE(s.holds());
    EXPECT_TRUE(relaxed_triangle_literal_sides(u, v, w, 1.0, 2.0).holds());
}

TEST(SquaredTriangle, MidpointIsTight) {
    const std::vector<double> u{0.0, 0.0}, v{1.0, 1.0}, w{2.0, 2.0};
    const auto s = squared_triangle_sides(u, v, w);
    EXPECT_DOUBLE_EQ(s.lhs, s.rhs);
}
