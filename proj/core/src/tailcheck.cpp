#include "dimred/tailcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dimred/parallel.hpp"
#include "dimred/random.hpp"
#include "json.hpp"

namespace dimred {

namespace {

Estimate bernoulli_estimate(std::size_t hits, std::size_t total) {
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

Estimate mean_estimate(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

void require_trials(std::size_t trials) {
    if (trials < 100) throw std::invalid_argument("at least 100 trials are required");
}

void require_eps(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

}  // namespace

std::vector<double> canonical_ratios(Family family, std::size_t m, std::size_t d, std::size_t trials,
                                     std::uint64_t seed, unsigned workers) {
    std::vector<double> ratios(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
        ratios[t] = norm(basis_image(family, m, d, derive_seed(seed, t), 0));
    });
    return ratios;
}

std::vector<double> canonical_ratios(const MapSampler& sampler, std::size_t source_dim,
                                     std::size_t trials, std::uint64_t seed, unsigned workers) {
    Vector e1(source_dim, 0.0);
    e1[0] = 1.0;
    std::vector<double> ratios(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
        ratios[t] = norm(sampler(derive_seed(seed, t)).apply(e1));
    });
    return ratios;
}

Estimate delta_from_ratios(std::span<const double> ratios, double eps) {
    require_eps(eps);
    std::size_t distorted = 0;
    for (double r : ratios)
        if (!within_band(r, eps)) ++distorted;
    return bernoulli_estimate(distorted, ratios.size());
}

Estimate rho_from_ratios(std::span<const double> ratios, double eps, double p) {
    require_eps(eps);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    const double cap = 1.0 + eps;
    const double cap_p = std::pow(cap, p);
    std::vector<double> excess(ratios.size(), 0.0);
    for (std::size_t i = 0; i < ratios.size(); ++i)
        if (ratios[i] > cap) excess[i] = std::pow(ratios[i], p) - cap_p;
    return mean_estimate(excess);
}

Estimate estimate_delta(Family family, std::size_t m, std::size_t d, double eps, std::size_t trials,
                        std::uint64_t seed, unsigned workers) {
    require_trials(trials);
    require_eps(eps);
    const auto ratios = canonical_ratios(family, m, d, trials, seed, workers);
    return delta_from_ratios(ratios, eps);
}

Estimate estimate_rho(Family family, std::size_t m, std::size_t d, double eps, double p,
                      std::size_t trials, std::uint64_t seed, unsigned workers) {
    require_trials(trials);
    const auto ratios = canonical_ratios(family, m, d, trials, seed, workers);
    return rho_from_ratios(ratios, eps, p);
}

std::vector<TailPoint> tail_curve_from_norms(std::span<const double> norms, std::span<const double> t_grid,
                                             std::size_t d, double c) {
    std::vector<TailPoint> curve;
    curve.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("tail grid points must be positive");
        std::size_t hits = 0;
        for (double r : norms)
            if (r >= 1.0 + t) ++hits;
        const Estimate e = bernoulli_estimate(hits, norms.size());
        curve.push_back({t, e.value, std::exp(-c * t * t * static_cast<double>(d)), e.std_error});
    }
    return curve;
}

std::vector<TailPoint> tail_curve(Family family, std::size_t m, std::size_t d, std::span<const double> t_grid,
                                  std::size_t trials, std::uint64_t seed, double c, unsigned workers) {
    const auto norms = canonical_ratios(family, m, d, trials, seed, workers);
    return tail_curve_from_norms(norms, t_grid, d, c);
}

ChiSquareTail chi_square_tail_bound(std::size_t d, double x) {
    if (d == 0) throw std::invalid_argument("chi-square degrees of freedom must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("x must be nonnegative");
    const double dd = static_cast<double>(d);
    return {dd + 2.0 * std::sqrt(dd * x) + 2.0 * x, std::exp(-x)};
}

Estimate chi_square_exceedance(std::size_t d, double x, std::size_t samples, std::uint64_t seed,
                               unsigned workers) {
    const double threshold = chi_square_tail_bound(d, x).threshold;
    std::vector<unsigned char> hit(samples, 0);
    parallel_for(samples, workers, [&](std::size_t s) {
        Rng rng(derive_seed(seed, s));
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double z = rng.normal();
            sum += z * z;
        }
        hit[s] = sum >= threshold ? 1 : 0;
    });
    std::size_t hits = 0;
    for (auto h : hit) hits += h;
    return bernoulli_estimate(hits, samples);
}

std::size_t standard_dimension(double eps, double p, std::size_t k, double alpha, double C) {
    if (!(eps > 0.0 && eps <= 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4]");
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2)");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
    const double value = C * std::pow(p, 4) * std::log(static_cast<double>(k) / (eps * alpha)) / (eps * eps);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(value)));
}

TailReport make_tail_report(const TailConfig& config) {
    require_trials(config.trials);
    TailReport report;
    report.config = config;
    const auto ratios =
        canonical_ratios(config.family, config.m, config.d, config.trials, config.seed, config.workers);
    report.delta = delta_from_ratios(ratios, config.eps);
    report.rho = rho_from_ratios(ratios, config.eps, config.p);
    report.tail = tail_curve_from_norms(ratios, config.t_grid, config.d, config.c);
    if (config.c_prime)
        report.above_dimension_floor =
            static_cast<double>(config.d) > *config.c_prime * config.p / (config.eps * config.eps);
    return report;
}

std::string to_json(const TailReport& report) {
    const auto& cfg = report.config;
    nlohmann::json j;
    j["config"] = {{"family", std::string(to_string(cfg.family))},
                   {"m", cfg.m},
                   {"d", cfg.d},
                   {"eps", cfg.eps},
                   {"p", cfg.p},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"t_grid", cfg.t_grid},
                   {"c", cfg.c}};
    if (cfg.c_prime) j["config"]["c_prime"] = *cfg.c_prime;
    j["delta_hat"] = {{"value", report.delta.value}, {"std_error", report.delta.std_error}};
    j["rho_hat"] = {{"value", report.rho.value}, {"std_error", report.rho.std_error}};
    auto& tail = j["tail_curve"] = nlohmann::json::array();
    for (const auto& pt : report.tail)
        tail.push_back({{"t", pt.t}, {"empirical", pt.empirical}, {"bound", pt.bound}, {"std_error", pt.std_error}});
    if (report.above_dimension_floor) j["above_dimension_floor"] = *report.above_dimension_floor;
    return j.dump(2);
}

std::string tail_curve_csv(const TailReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "# family=" << to_string(report.config.family) << " m=" << report.config.m
        << " d=" << report.config.d << " trials=" << report.config.trials << " seed=" << report.config.seed
        << " c=" << report.config.c << "\n";
    out << "t,empirical,bound,stderr\n";
    for (const auto& pt : report.tail)
        out << pt.t << ',' << pt.empirical << ',' << pt.bound << ',' << pt.std_error << '\n';
    return out.str();
}

}  // namespace dimred
