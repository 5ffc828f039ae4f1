#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dimred/tailcheck.hpp"

using namespace dimred;

TEST(Delta, SquareSubspaceNeverDistorts) {
    const auto e = estimate_delta(Family::subspace, 10, 10, 0.1, 1000, 3);
    EXPECT_EQ(e.value, 0.0);
}

TEST(Delta, SmallAtLargeTargetDimension) {
    const auto e = estimate_delta(Family::gaussian, 50, 200, 0.5, 10000, 4);
    EXPECT_LE(e.value, 0.01);
}

TEST(Delta, LargeAtDimensionOne) {
    const auto e = estimate_delta(Family::gaussian, 50, 1, 0.1, 10000, 5);
    EXPECT_GE(e.value, 0.5);
}

TEST(Delta, RejectsTooFewTrials) {
    EXPECT_THROW(estimate_delta(Family::gaussian, 5, 5, 0.1, 99, 0), std::invalid_argument);
}

TEST(Delta, MedianDecreasesWithDimension) {
    std::vector<double> low, high;
    for (std::uint64_t s = 0; s < 20; ++s) {
        low.push_back(estimate_delta(Family::gaussian, 16, 8, 0.3, 500, s).value);
        high.push_back(estimate_delta(Family::gaussian, 16, 128, 0.3, 500, 100 + s).value);
    }
    std::nth_element(low.begin(), low.begin() + 10, low.end());
    std::nth_element(high.begin(), high.begin() + 10, high.end());
    EXPECT_LE(high[10], low[10]);
}

TEST(Delta, WorkerCountDoesNotChangeResult) {
    const auto a = estimate_delta(Family::gaussian, 20, 6, 0.2, 2000, 42, 1);
    const auto b = estimate_delta(Family::gaussian, 20, 6, 0.2, 2000, 42, 8);
    EXPECT_EQ(a.value, b.value);
}

TEST(Rho, SquareSubspaceHasNoExpansion) {
    EXPECT_EQ(estimate_rho(Family::subspace, 7, 7, 0.1, 2.0, 500, 1).value, 0.0);
}

TEST(Rho, SmallAtLargeTargetDimension) {
    EXPECT_LE(estimate_rho(Family::gaussian, 50, 200, 0.5, 2.0, 10000, 2).value, 0.01);
}

TEST(Rho, DegenerateScalingFamily) {
    const double eps = 0.3;
    MapSampler fixed = [&](std::uint64_t) { return ProjectionMap::from_entries(1, 1, {1.0 + 2.0 * eps}); };
    const auto ratios = canonical_ratios(fixed, 1, 100, 0);
    EXPECT_NEAR(rho_from_ratios(ratios, eps, 1.0).value, eps, 1e-15);
}

TEST(Rho, NonincreasingInEps) {
    const auto ratios = canonical_ratios(Family::gaussian, 10, 4, 2000, 6);
    double prev = rho_from_ratios(ratios, 0.05, 2.0).value;
    for (double eps : {0.1, 0.2, 0.4, 0.8}) {
        const double cur = rho_from_ratios(ratios, eps, 2.0).value;
        EXPECT_LE(cur, prev);
        prev = cur;
    }
}

TEST(TailCurve, LargeThresholdHasZeroProbability) {
    const std::vector<double> grid{100.0};
    const auto curve = tail_curve(Family::gaussian, 4, 20, grid, 1000, 1);
    EXPECT_EQ(curve[0].empirical, 0.0);
}

TEST(TailCurve, GaussianBelowSubGaussianBound) {
    const std::vector<double> grid{0.5};
    const auto curve = tail_curve(Family::gaussian, 4, 20, grid, 10000, 2);
    EXPECT_NEAR(curve[0].bound, std::exp(-2.5), 1e-15);
    EXPECT_LE(curve[0].empirical, curve[0].bound + 3 * curve[0].std_error);
}

TEST(TailCurve, BoundTendsToOneNearZero) {
    const std::vector<double> grid{1e-9};
    const auto curve = tail_curve(Family::gaussian, 4, 20, grid, 200, 3);
    EXPECT_NEAR(curve[0].bound, 1.0, 1e-12);
}

TEST(TailCurve, RejectsNonpositiveT) {
    const std::vector<double> grid{0.0};
    EXPECT_THROW(tail_curve(Family::gaussian, 4, 20, grid, 200, 3), std::invalid_argument);
}

TEST(TailCurve, HigherDimensionHasLighterTail) {
    const std::vector<double> grid{0.25, 0.5, 1.0};
    const auto lo = tail_curve(Family::gaussian, 8, 10, grid, 5000, 10);
    const auto hi = tail_curve(Family::gaussian, 8, 40, grid, 5000, 11);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double se = std::sqrt(lo[i].std_error * lo[i].std_error + hi[i].std_error * hi[i].std_error);
        EXPECT_LE(hi[i].empirical, lo[i].empirical + 3 * se);
    }
}

TEST(ChiSquare, LaurentMassartFormula) {
    const auto b = chi_square_tail_bound(4, 1.0);
    EXPECT_DOUBLE_EQ(b.threshold, 10.0);
    EXPECT_NEAR(b.bound, 0.36788, 1e-5);
    EXPECT_EQ(b.bound, std::exp(-1.0));
    const auto z = chi_square_tail_bound(7, 0.0);
    EXPECT_EQ(z.threshold, 7.0);
    EXPECT_EQ(z.bound, 1.0);
}

TEST(ChiSquare, MonteCarloBelowBound) {
    const auto e = chi_square_exceedance(4, 1.0, 100000, 12);
    EXPECT_LE(e.value, std::exp(-1.0) + 3 * e.std_error);
}

TEST(StandardDimension, WorkedExample) { EXPECT_EQ(standard_dimension(0.25, 2, 4, 0.1, 1.0), 1300u); }

TEST(StandardDimension, DoublingKAddsLogTwoTerm) {
    const double eps = 0.2, p = 1.5, alpha = 0.2, C = 0.7;
    const std::size_t d1 = standard_dimension(eps, p, 5, alpha, C);
    const std::size_t d2 = standard_dimension(eps, p, 10, alpha, C);
    const double step = C * std::pow(p, 4) * std::log(2.0) / (eps * eps);
    EXPECT_LE(std::abs(double(d2) - double(d1) - step), 1.0);
}

TEST(StandardDimension, MatchesFormulaAtPOne) {
    // k / (eps alpha) = e is unreachable inside the preconditions (eps alpha < 1/8),
    // so check the p = 1 formula directly instead.
    for (std::size_t k : {1u, 3u, 17u}) {
        const double eps = 0.2, alpha = 0.3, C = 2.0;
        const auto expected = static_cast<std::size_t>(std::ceil(C * std::log(k / (eps * alpha)) / (eps * eps)));
        EXPECT_EQ(standard_dimension(eps, 1.0, k, alpha, C), expected);
    }
}

TEST(StandardDimension, RejectsOutOfRange) {
    EXPECT_THROW(standard_dimension(0.3, 2, 4, 0.1, 1), std::invalid_argument);
    EXPECT_THROW(standard_dimension(0.2, 2, 4, 0.6, 1), std::invalid_argument);
    EXPECT_THROW(standard_dimension(0.2, 0.5, 4, 0.1, 1), std::invalid_argument);
    EXPECT_THROW(standard_dimension(0.2, 2, 0, 0.1, 1), std::invalid_argument);
    EXPECT_THROW(standard_dimension(0.2, 2, 4, 0.1, 0), std::invalid_argument);
}

TEST(TailReport, JsonAndCsvCarrySeed) {
    TailConfig cfg;
    cfg.trials = 200;
    cfg.seed = 31337;
    const auto rep = make_tail_report(cfg);
    EXPECT_NE(to_json(rep).find("31337"), std::string::npos);
    const auto csv = tail_curve_csv(rep);
    EXPECT_NE(csv.find("seed=31337"), std::string::npos);
    EXPECT_NE(csv.find("t,empirical,bound,stderr"), std::string::npos);
}
