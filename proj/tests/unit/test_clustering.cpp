#include <gtest/gtest.h>

#include <cmath>

#include "dimred/clustering.hpp"
#include "dimred/generators.hpp"
#include "dimred/partitions.hpp"
#include "dimred/random.hpp"

using namespace dimred;

namespace {

std::vector<Vector> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> pts(n, Vector(dim));
    for (auto& p : pts)
        for (auto& c : p) c = rng.normal();
    return pts;
}

}  // namespace

TEST(Center, MeanForPTwo) {
    const std::vector<Vector> pts{{0, 0}, {2, 0}};
    const auto r = center_and_cost(pts, {}, 2.0);
    EXPECT_DOUBLE_EQ(r.center[0], 1.0);
    EXPECT_DOUBLE_EQ(r.center[1], 0.0);
    EXPECT_DOUBLE_EQ(r.cost, 2.0);
}

TEST(Center, WeightedMeanIsExact) {
    const std::vector<Vector> pts{{0.0}, {3.0}};
    const std::vector<double> w{1.0, 2.0};
    const auto r = center_and_cost(pts, w, 2.0);
    EXPECT_DOUBLE_EQ(r.center[0], 2.0);
    EXPECT_DOUBLE_EQ(r.cost, 4.0 + 2.0);
}

TEST(Center, MedianForPOne) {
    const std::vector<Vector> pts{{0.0}, {0.0}, {10.0}};
    const auto r = center_and_cost(pts, {}, 1.0);
    EXPECT_NEAR(r.center[0], 0.0, 1e-9);
    EXPECT_NEAR(r.cost, 10.0, 1e-9);
    EXPECT_TRUE(r.converged);
}

TEST(Center, CubicCostOnUnitInterval) {
    const std::vector<Vector> pts{{0.0}, {1.0}};
    const auto r = center_and_cost(pts, {}, 3.0);
    // Grid-search oracle over [0,1].
    double best = 1e9, arg = 0;
    for (int i = 0; i <= 100000; ++i) {
        const double c = i / 100000.0;
        const double v = c * c * c + (1 - c) * (1 - c) * (1 - c);
        if (v < best) best = v, arg = c;
    }
    EXPECT_NEAR(r.center[0], arg, 1e-6);
    EXPECT_NEAR(r.cost, 0.25, 1e-9);
    EXPECT_NEAR(r.cost, best, 1e-9);
}

TEST(Center, EmptyClusterHasUndefinedCenter) {
    const std::vector<Vector> none;
    const auto r = center_and_cost(none, {}, 2.0);
    EXPECT_FALSE(r.center_defined);
    EXPECT_EQ(r.cost, 0.0);
    const std::vector<Vector> pts{{1.0}, {2.0}};
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_FALSE(center_and_cost(pts, zero, 1.0).center_defined);
}

TEST(Center, ReportedCostMatchesCenter) {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const auto pts = random_points(15, 3, 7);
        const auto r = center_and_cost(pts, {}, p);
        EXPECT_NEAR(r.cost, weighted_power_cost(pts, {}, r.center, p), 1e-12 * (1 + r.cost));
    }
}

TEST(Center, NoProbeBeatsReturnedCenter) {
    Rng rng(3);
    for (double p : {1.0, 1.3, 2.0, 2.5, 4.0}) {
        const auto pts = random_points(12, 4, 100 + static_cast<int>(p * 10));
        const auto r = center_and_cost(pts, {}, p);
        for (int probe = 0; probe < 100; ++probe) {
            Vector c(4);
            for (auto& x : c) x = rng.normal();
            EXPECT_LE(r.cost, weighted_power_cost(pts, {}, c, p) + 1e-10);
        }
    }
}

TEST(Center, MedianAtDataPointViaSubgradient) {
    // Four points around a heavy center: the geometric median is the center.
    const std::vector<Vector> pts{{0, 0}, {0, 0}, {0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const auto r = center_and_cost(pts, {}, 1.0);
    EXPECT_NEAR(r.center[0], 0.0, 1e-9);
    EXPECT_NEAR(r.center[1], 0.0, 1e-9);
    EXPECT_NEAR(r.cost, 4.0, 1e-9);
}

TEST(Cost, SingletonsCostNothing) {
    const auto data = Dataset::from_points(random_points(6, 2, 1));
    Clustering c;
    c.k = 6;
    c.assignment = {0, 1, 2, 3, 4, 5};
    EXPECT_EQ(cost_of_clustering(data, c, 2.0), 0.0);
}

TEST(Cost, IdenticalPointsCostNothing) {
    const auto data = Dataset::from_points({{1, 1}, {1, 1}, {1, 1}});
    Clustering c;
    c.assignment = {0, 0, 0};
    EXPECT_EQ(cost_of_clustering(data, c, 1.0), 0.0);
    EXPECT_EQ(cost_of_clustering(data, c, 2.0), 0.0);
}

TEST(Cost, TwoMidpoints) {
    const auto data = Dataset::from_points({{0, 0}, {2, 0}, {10, 0}, {12, 0}});
    Clustering c;
    c.k = 2;
    c.assignment = {0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(cost_of_clustering(data, c, 2.0), 4.0);
}

TEST(Cost, EmptyClustersAreFlaggedNotRejected) {
    const auto data = Dataset::from_points({{0.0}, {1.0}});
    Clustering c;
    c.k = 3;
    c.assignment = {0, 0};
    EXPECT_EQ(c.empty_clusters(), 2u);
    EXPECT_DOUBLE_EQ(cost_of_clustering(data, c, 2.0), 0.5);
}

TEST(Cost, RejectsBadAssignment) {
    const auto data = Dataset::from_points({{0.0}, {1.0}});
    Clustering c;
    c.k = 1;
    c.assignment = {0, 1};
    EXPECT_THROW(cost_of_clustering(data, c, 2.0), std::invalid_argument);
}

TEST(Cost, RelabelingAndRigidMotionInvariance) {
    auto pts = random_points(10, 3, 5);
    const auto data = Dataset::from_points(pts);
    Clustering c;
    c.k = 3;
    c.assignment = {0, 1, 2, 0, 1, 2, 0, 0, 1, 2};
    Clustering relabeled = c;
    for (auto& a : relabeled.assignment) a = (a + 1) % 3;
    // Rotation in the first two coordinates plus a shift.
    const double ang = 0.7;
    for (auto& x : pts) {
        const double a = x[0], b = x[1];
        x[0] = std::cos(ang) * a - std::sin(ang) * b + 5.0;
        x[1] = std::sin(ang) * a + std::cos(ang) * b - 2.0;
        x[2] += 1.0;
    }
    const auto moved = Dataset::from_points(pts);
    for (double p : {1.0, 2.0, 3.0}) {
        const double base = cost_of_clustering(data, c, p);
        EXPECT_NEAR(cost_of_clustering(data, relabeled, p), base, 1e-9 * base);
        EXPECT_NEAR(cost_of_clustering(moved, c, p), base, 1e-9 * base);
    }
}

TEST(Cost, SplittingNeverIncreasesCost) {
    const auto data = Dataset::from_points(random_points(9, 2, 8));
    Clustering whole;
    whole.assignment.assign(9, 0);
    Clustering split;
    split.k = 2;
    split.assignment = {0, 1, 0, 1, 0, 1, 0, 1, 0};
    for (double p : {1.0, 2.0, 3.0})
        EXPECT_LE(cost_of_clustering(data, split, p), cost_of_clustering(data, whole, p) + 1e-9);
}

TEST(Pairwise, SinglePair) {
    const std::vector<Vector> pts{{0, 0}, {2, 0}};
    EXPECT_DOUBLE_EQ(kmeans_pairwise_cost(pts), 2.0);
    EXPECT_EQ(kmeans_pairwise_cost(std::vector<Vector>{{3, 4}}), 0.0);
}

TEST(Pairwise, MatchesCenterFormula) {
    const auto pts = random_points(30, 5, 12);
    const double center = center_and_cost(pts, {}, 2.0).cost;
    EXPECT_NEAR(kmeans_pairwise_cost(pts), center, 1e-9 * center);
}

TEST(WeightedPair, UniformOnTwoPoints) {
    const std::vector<Vector> pts{{0.0}, {1.0}};
    const std::vector<double> lambda{0.5, 0.5};
    EXPECT_DOUBLE_EQ(weighted_pair_cost(pts, lambda), 0.25);
}

TEST(WeightedPair, PointMass) {
    const auto pts = random_points(4, 2, 1);
    const std::vector<double> lambda{1.0, 0.0, 0.0, 0.0};
    EXPECT_EQ(weighted_pair_cost(pts, lambda), 0.0);
}

TEST(WeightedPair, MatchesMeanCenterOracle) {
    Rng rng(4);
    const auto pts = random_points(10, 3, 13);
    std::vector<double> lambda(10);
    double total = 0;
    for (auto& l : lambda) total += (l = rng.uniform());
    for (auto& l : lambda) l /= total;
    Vector mean(3, 0.0);
    for (std::size_t i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) mean[j] += lambda[i] * pts[i][j];
    double oracle = 0.0;
    for (std::size_t i = 0; i < 10; ++i) oracle += lambda[i] * squared_distance(pts[i], mean);
    EXPECT_NEAR(weighted_pair_cost(pts, lambda), oracle, 1e-9 * oracle);
}

TEST(WeightedPair, RejectsNonSimplexWeights) {
    const std::vector<Vector> pts{{0.0}, {1.0}};
    const std::vector<double> lambda{0.5, 0.6};
    EXPECT_THROW(weighted_pair_cost(pts, lambda), std::invalid_argument);
}

TEST(Lloyd, IdenticalPointsCostZero) {
    const auto data = Dataset::from_points({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
    EXPECT_EQ(lloyd_heuristic(data, 2, 2.0, 1).cost, 0.0);
}

TEST(Lloyd, NeverBeatsBruteForceAndMatchesOnBlobs) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto data = Dataset::from_points(random_points(8, 2, 40 + s));
        for (double p : {1.0, 2.0}) {
            const double exact = optimal_clustering_bruteforce(data, 3, p).cost;
            EXPECT_GE(lloyd_heuristic(data, 3, p, s, 4).cost, exact - 1e-9);
        }
    }
    const auto blobs = gen_blobs(3, 3, 2, 0.1, 50.0, 9);
    EXPECT_NEAR(lloyd_heuristic(blobs, 3, 2.0, 1, 4).cost, optimal_clustering_bruteforce(blobs, 3, 2.0).cost, 1e-9);
}

TEST(Lloyd, MoreRestartsNeverWorse) {
    const auto data = Dataset::from_points(random_points(30, 3, 77));
    for (std::uint64_t s = 0; s < 5; ++s)
        EXPECT_LE(lloyd_heuristic(data, 4, 2.0, s, 8).cost, lloyd_heuristic(data, 4, 2.0, s, 1).cost);
}
