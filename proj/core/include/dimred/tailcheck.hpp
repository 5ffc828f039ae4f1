#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dimred/projection.hpp"

namespace dimred {

/// Monte Carlo estimate with its normal-approximation standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Draws one map per trial seed. Lets the estimators run on families that
/// are not built in, including degenerate single-map families in tests.
using MapSampler = std::function<ProjectionMap(std::uint64_t seed)>;

/// ||pi(e_1)|| for one fresh map per trial, trial t using derive_seed(seed, t).
/// Every family here is linear and rotation invariant, so this is the distance
/// ratio of any fixed pair.
std::vector<double> canonical_ratios(Family family, std::size_t m, std::size_t d, std::size_t trials,
                                     std::uint64_t seed, unsigned workers = 1);
std::vector<double> canonical_ratios(const MapSampler& sampler, std::size_t source_dim,
                                     std::size_t trials, std::uint64_t seed, unsigned workers = 1);

Estimate delta_from_ratios(std::span<const double> ratios, double eps);
/// Mean of 1{r > 1+eps} * (r^p - (1+eps)^p).
Estimate rho_from_ratios(std::span<const double> ratios, double eps, double p);

Estimate estimate_delta(Family family, std::size_t m, std::size_t d, double eps, std::size_t trials,
                        std::uint64_t seed, unsigned workers = 1);
Estimate estimate_rho(Family family, std::size_t m, std::size_t d, double eps, double p,
                      std::size_t trials, std::uint64_t seed, unsigned workers = 1);

struct TailPoint {
    double t = 0.0;
    double empirical = 0.0;  // Pr(||pi x|| >= 1 + t)
    double bound = 1.0;      // exp(-c t^2 d)
    double std_error = 0.0;
};

std::vector<TailPoint> tail_curve_from_norms(std::span<const double> norms, std::span<const double> t_grid,
                                             std::size_t d, double c = 0.5);
std::vector<TailPoint> tail_curve(Family family, std::size_t m, std::size_t d, std::span<const double> t_grid,
                                  std::size_t trials, std::uint64_t seed, double c = 0.5,
                                  unsigned workers = 1);

/// Laurent-Massart: Pr(chi2_d >= d + 2 sqrt(d x) + 2x) <= exp(-x).
struct ChiSquareTail {
    double threshold = 0.0;
    double bound = 1.0;
};
ChiSquareTail chi_square_tail_bound(std::size_t d, double x);

/// Fraction of `samples` chi-square(d) draws (sums of squared normals) at or
/// above the Laurent-Massart threshold.
Estimate chi_square_exceedance(std::size_t d, double x, std::size_t samples, std::uint64_t seed,
                               unsigned workers = 1);

/// ceil(C p^4 ln(k / (eps alpha)) / eps^2) for eps in (0,1/4], alpha in (0,1/2).
std::size_t standard_dimension(double eps, double p, std::size_t k, double alpha, double C);

struct TailConfig {
    Family family = Family::gaussian;
    std::size_t m = 16;
    std::size_t d = 16;
    double eps = 0.5;
    double p = 2.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    std::vector<double> t_grid{0.25, 0.5, 1.0};
    double c = 0.5;
    /// Dimension floor constant for the standardness check (d > c' p / eps^2).
    std::optional<double> c_prime;
    unsigned workers = 1;
};

struct TailReport {
    TailConfig config;
    Estimate delta;
    Estimate rho;
    std::vector<TailPoint> tail;
    std::optional<bool> above_dimension_floor;
};

TailReport make_tail_report(const TailConfig& config);

std::string to_json(const TailReport& report);
/// Columns t,empirical,bound,stderr with a leading "# seed=..." comment line.
std::string tail_curve_csv(const TailReport& report);

}  // namespace dimred
