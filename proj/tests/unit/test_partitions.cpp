#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dimred/generators.hpp"
#include "dimred/partitions.hpp"
#include "dimred/random.hpp"

using namespace dimred;

namespace {

// Independent Stirling oracle via inclusion-exclusion.
std::uint64_t stirling_oracle(std::size_t n, std::size_t k) {
    long double total = 0;
    long double binom = 1;
    for (std::size_t j = 0; j <= k; ++j) {
        if (j > 0) binom = binom * (k - j + 1) / j;
        const long double term = binom * std::pow(static_cast<long double>(k - j), static_cast<long double>(n));
        total += (j % 2 ? -term : term);
    }
    long double fact = 1;
    for (std::size_t i = 2; i <= k; ++i) fact *= i;
    return static_cast<std::uint64_t>(std::llround(total / fact));
}

std::size_t count_enumerated(std::size_t n, std::size_t k) {
    std::size_t count = 0;
    enumerate_partitions(n, k, [&](std::span<const std::size_t>) { ++count; });
    return count;
}

}  // namespace

TEST(Partitions, SmallCounts) {
    EXPECT_EQ(count_enumerated(4, 2), 8u);
    EXPECT_EQ(count_enumerated(3, 3), 5u);
    EXPECT_EQ(count_enumerated(1, 5), 1u);
}

TEST(Partitions, CountsMatchStirlingOracle) {
    for (std::size_t n = 1; n <= 10; ++n)
        for (std::size_t k = 1; k <= n; ++k) {
            std::uint64_t oracle = 0;
            for (std::size_t j = 1; j <= k; ++j) oracle += stirling_oracle(n, j);
            EXPECT_EQ(count_enumerated(n, k), oracle) << "n=" << n << " k=" << k;
            EXPECT_EQ(count_partitions(n, k), oracle);
        }
}

TEST(Partitions, EachPartitionOnceInCanonicalOrder) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> prev;
    enumerate_partitions(7, 3, [&](std::span<const std::size_t> rgs) {
        std::vector<std::size_t> cur(rgs.begin(), rgs.end());
        EXPECT_EQ(cur[0], 0u);
        std::size_t mx = 0;
        for (std::size_t i = 1; i < cur.size(); ++i) {
            EXPECT_LE(cur[i], mx + 1);
            EXPECT_LT(cur[i], 3u);
            mx = std::max(mx, cur[i]);
        }
        if (!prev.empty()) EXPECT_LT(prev, cur);
        EXPECT_TRUE(seen.insert(cur).second);
        prev = cur;
    });
}

TEST(Partitions, GuardRejectsLargeN) {
    EXPECT_THROW(enumerate_partitions(15, 2, [](std::span<const std::size_t>) {}), std::invalid_argument);
}

TEST(Partitions, PrefixEnumeratorCoversCompletions) {
    const std::vector<std::size_t> prefix{0, 1};
    PartitionEnumerator it(5, 3, prefix);
    std::size_t count = 0;
    do {
        EXPECT_EQ(it.current()[0], 0u);
        EXPECT_EQ(it.current()[1], 1u);
        ++count;
    } while (it.next());
    std::size_t direct = 0;
    enumerate_partitions(5, 3, [&](std::span<const std::size_t> r) { direct += (r[1] == 1); });
    EXPECT_EQ(count, direct);
}

TEST(BruteForce, SplitsTwoFarBlobs) {
    const auto data = Dataset::from_points({{0, 0}, {1, 0}, {100, 0}, {101, 0}});
    const auto r = optimal_clustering_bruteforce(data, 2, 2.0);
    EXPECT_DOUBLE_EQ(r.cost, 1.0);
    EXPECT_EQ(r.clustering.assignment, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(BruteForce, KAtLeastNIsFree) {
    const auto data = Dataset::from_points({{0.0}, {3.0}, {7.0}});
    const auto r = optimal_clustering_exact(data, 5, 2.0);
    EXPECT_EQ(r.cost, 0.0);
    EXPECT_EQ(optimal_clustering_bruteforce(data, 3, 2.0).cost, 0.0);
}

TEST(BruteForce, LowerBoundInstanceThreePairs) {
    const auto data = gen_lower_bound_instance(3, 1000.0, 4, 0);
    EXPECT_NEAR(optimal_clustering_bruteforce(data, 5, 2.0).cost, 0.5, 1e-12);
}

TEST(BruteForce, WorkerCountDoesNotChangeWinner) {
    Rng rng(2);
    std::vector<Vector> pts(9, Vector(2));
    for (auto& p : pts)
        for (auto& c : p) c = std::round(rng.uniform(0, 3));  // many ties
    const auto data = Dataset::from_points(pts);
    const auto a = optimal_clustering_bruteforce(data, 3, 2.0, {}, 1);
    const auto b = optimal_clustering_bruteforce(data, 3, 2.0, {}, 8);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.clustering.assignment, b.clustering.assignment);
}

TEST(Exact, CheapestPairMatchesEnumeration) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng(s);
        std::vector<Vector> pts(7, Vector(3));
        for (auto& p : pts)
            for (auto& c : p) c = rng.normal();
        const auto data = Dataset::from_points(pts);
        for (double p : {1.0, 2.0, 3.0}) {
            const auto fast = optimal_clustering_exact(data, 6, p);
            const auto slow = optimal_clustering_bruteforce(data, 6, p);
            EXPECT_NEAR(fast.cost, slow.cost, 1e-9 * (1 + slow.cost));
            EXPECT_EQ(fast.clustering.assignment, slow.clustering.assignment);
        }
    }
}

TEST(SubsetTable, MatchesDirectCosts) {
    Rng rng(6);
    std::vector<Vector> pts(5, Vector(2));
    for (auto& p : pts)
        for (auto& c : p) c = rng.normal();
    const auto table = subset_cost_table(pts, 2.0);
    ASSERT_EQ(table.size(), 32u);
    EXPECT_EQ(table[0], 0.0);
    const std::vector<Vector> block{pts[0], pts[2], pts[3]};
    EXPECT_NEAR(table[0b01101], cluster_cost(block, 2.0), 1e-12);
}
