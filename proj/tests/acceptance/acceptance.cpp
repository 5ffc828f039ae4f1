// Acceptance suite: one PASS/FAIL line per criterion, informational lines
// prefixed with "info". Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "dimred/clustering.hpp"
#include "dimred/corelemma.hpp"
#include "dimred/experiment.hpp"
#include "dimred/extension.hpp"
#include "dimred/generators.hpp"
#include "dimred/inequalities.hpp"
#include "dimred/random.hpp"
#include "dimred/tailcheck.hpp"

using namespace dimred;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kRelTol = 1e-9;        // criterion 1
constexpr double kIneqSlack = 1e-12;    // criterion 2
constexpr double kSigmas = 3.0;         // statistical criteria
constexpr double kSaddleTol = 1e-6;     // criterion 8

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void verdict(int id, const char* name, bool ok, double elapsed, double budget, const std::string& detail) {
    const bool in_time = elapsed <= budget;
    const bool pass = ok && in_time;
    if (!pass) ++failures;
    std::printf("%s %2d %-28s %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), elapsed,
                budget, in_time ? "" : ", over budget");
    std::fflush(stdout);
}

template <typename... Args>
void info(const char* fmt, Args... args) {
    std::printf("info    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::vector<Vector> gaussian_points(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<Vector> pts(n, Vector(dim));
    for (auto& p : pts)
        for (auto& c : p) c = rng.normal() * 3.0 + rng.uniform(-5.0, 5.0);
    return pts;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

void criterion1() {
    Timer t;
    Rng rng(derive_seed(kSeed, 1));
    std::size_t bad_pairwise = 0, bad_weighted = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng.below(50);
        const std::size_t dim = 1 + rng.below(10);
        const auto pts = gaussian_points(rng, n, dim);
        const double pairwise = kmeans_pairwise_cost(pts);
        const double center = center_and_cost(pts, {}, 2.0).cost;
        worst = std::max(worst, std::abs(pairwise - center) / std::max(1.0, center));
        if (!rel_close(pairwise, center, kRelTol)) ++bad_pairwise;

        std::vector<double> lambda(n);
        double total = 0.0;
        for (auto& l : lambda) total += (l = rng.uniform() + 1e-3);
        for (auto& l : lambda) l /= total;
        // Direct minimizer of sum lambda ||x - c||^2 is the lambda-mean.
        Vector mean(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) mean[j] += lambda[i] * pts[i][j];
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) direct += lambda[i] * squared_distance(pts[i], mean);
        if (!rel_close(weighted_pair_cost(pts, lambda), direct, kRelTol)) ++bad_weighted;
    }
    verdict(1, "variance/pairwise identity", bad_pairwise == 0 && bad_weighted == 0, t.seconds(), 5,
            fmt("mismatches pairwise=%g weighted=%g, worst rel err %.2e", double(bad_pairwise), double(bad_weighted),
                worst));
}

void criterion2() {
    Timer t;
    Rng rng(derive_seed(kSeed, 2));
    std::size_t bad_sum = 0, bad_triangle = 0, literal_fail = 0, literal_fail_p_le_2 = 0;
    const std::size_t tuples = 100000;
    for (std::size_t rep = 0; rep < tuples; ++rep) {
        const double eps = 2.0 * (1.0 - rng.uniform());  // (0, 2]
        const double p = rng.uniform(1.0, 4.0);
        std::vector<double> ys(1 + rng.below(4));
        for (auto& y : ys) y = rng.uniform(0.0, 5.0);
        if (!sum_power_sides(rng.uniform(0.0, 5.0), ys, eps, p).holds(kIneqSlack)) ++bad_sum;

        const std::size_t dim = 1 + rng.below(3);
        Vector u(dim), v(dim), w(dim);
        for (auto* pt : {&u, &v, &w})
            for (auto& c : *pt) c = rng.normal();
        if (!relaxed_triangle_sides(u, v, w, eps, p).holds(kIneqSlack)) ++bad_triangle;
        if (!relaxed_triangle_literal_sides(u, v, w, eps, p).holds(kIneqSlack)) {
            ++literal_fail;
            if (p <= 2.0) ++literal_fail_p_le_2;
        }
    }
    verdict(2, "power inequalities", bad_sum == 0 && bad_triangle == 0, t.seconds(), 5,
            fmt("%g tuples, violations sum-power=%g triangle=%g", double(tuples), double(bad_sum), double(bad_triangle)));
    info("linear (1+eps) coefficient on the triangle form: %zu violations, %zu with p <= 2", literal_fail,
         literal_fail_p_le_2);
}

void criterion3() {
    Timer t;
    bool ok = true;
    double worst = -1.0;
    for (std::size_t d : {5, 20, 100})
        for (double x : {0.5, 1.0, 2.0}) {
            const auto bound = chi_square_tail_bound(d, x);
            const auto est = chi_square_exceedance(d, x, 100000, derive_seed(kSeed, 3, d * 10 + std::size_t(x * 2)),
                                                   workers());
            const double slack = est.value - (bound.bound + kSigmas * est.std_error);
            worst = std::max(worst, est.value - bound.bound);
            if (slack > 0) ok = false;
            info("chi2 d=%zu x=%.1f empirical %.5f bound %.5f", d, x, est.value, bound.bound);
        }
    verdict(3, "chi-square tail", ok, t.seconds(), 30, fmt("max(empirical - bound) = %.4f", worst));
}

void criterion4() {
    Timer t;
    bool ok = true;
    const std::vector<double> grid{0.25, 0.5, 1.0};
    for (std::size_t d : {10, 50}) {
        const auto curve = tail_curve(Family::gaussian, 64, d, grid, 10000, derive_seed(kSeed, 4, d), 0.5, workers());
        for (const auto& pt : curve) {
            if (pt.empirical > pt.bound + kSigmas * pt.std_error) ok = false;
            info("tail d=%zu t=%.2f empirical %.5f bound %.5f", d, pt.t, pt.empirical, pt.bound);
        }
    }
    verdict(4, "sub-Gaussian tail", ok, t.seconds(), 60, "exp(-t^2 d/2) bound over 1e4 maps");
}

void criterion5() {
    Timer t;
    const double eps = 0.5;
    const auto d = static_cast<std::size_t>(std::ceil(8.0 * std::log(1.0 / 0.05) / (eps * eps)));
    const auto at_d = estimate_delta(Family::gaussian, 50, d, eps, 10000, derive_seed(kSeed, 5, 0), workers());
    const auto at_4 = estimate_delta(Family::gaussian, 50, 4, eps, 10000, derive_seed(kSeed, 5, 1), workers());
    const auto at_96 = estimate_delta(Family::gaussian, 50, 96, eps, 10000, derive_seed(kSeed, 5, 2), workers());
    const bool ok = at_d.value <= 0.05 + kSigmas * at_d.std_error && at_4.value > at_96.value;
    verdict(5, "delta estimation", ok, t.seconds(), 60,
            fmt("d=%g delta %.4f; delta(4)=%.4f > delta(96)=%.4f", double(d), at_d.value, at_4.value, at_96.value));
}

void criterion6() {
    Timer t;
    const double thetas[] = {0.1, 0.2, 0.4};
    std::size_t checks = 0, failed = 0, lemma_runs = 0, header_misses = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const std::uint64_t seed = derive_seed(kSeed, 6, i);
        Rng rng(seed);
        const std::size_t n = 1 + rng.below(6);
        const std::size_t support = 1 + rng.below(16);
        const double theta = thetas[i % 3];

        const auto dist = random_subset_distribution(n, support, seed);
        ++checks;
        if (!verify_measure(dist, build_measure_padded(dist, theta)).passed()) ++failed;

        const auto frequent = restrict_to_frequent(dist, 2.0 * theta);
        if (frequent.ground_size > 0) {
            ++checks;
            ++lemma_runs;
            const auto rep = verify_measure(frequent, build_measure(frequent, theta));
            if (!rep.passed()) ++failed;
            if (rep.condition2_header && !*rep.condition2_header) ++header_misses;
        }

        const auto pc = random_partial_clustering(n, 1 + rng.below(3), support, derive_seed(seed, 1));
        ++checks;
        if (!verify_measure(pc, build_measure_clustering(pc, theta)).passed()) ++failed;
    }
    verdict(6, "measure construction", failed == 0, t.seconds(), 10,
            fmt("%g checks (%g on the unpadded construction), %g failed", double(checks), double(lemma_runs),
                double(failed)));
    info("condition 2 against theta instead of 2 theta missed on %zu of %zu unpadded runs", header_misses, lemma_runs);
}

void criterion7() {
    Timer t;
    const double thetas[] = {0.1, 0.2, 0.4};
    const double rates[] = {0.01, 0.05, 0.2};
    std::size_t realizations = 0, core_points = 0, bad_fraction = 0, bad_shape = 0, bad_observation = 0, emptied = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::uint64_t seed = derive_seed(kSeed, 7, i);
        Rng rng(seed);
        const std::size_t n = 2 + rng.below(7);
        const std::size_t k = 1 + rng.below(3);
        const double theta = thetas[i % 3];
        const auto dist = random_partial_clustering(n, k, 1 + rng.below(8), seed);
        const auto measure = build_measure_clustering(dist, theta / 3.0);
        for (std::size_t j = 0; j < dist.support.size(); ++j) {
            const auto& clusters = dist.support[j].clusters;
            const auto& R = measure.R_of[j];
            ++realizations;
            if (!check_observation(clusters, R, measure.mu)) ++bad_observation;

            PairRelation distorted(n);
            const double rate = rates[rng.below(3)];
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (rng.uniform() < rate) distorted.insert(a, b);
            const auto pr = prune(n, clusters, distorted, measure.mu, R, theta);
            if (pr.emptied) {
                ++emptied;
                continue;
            }
            for (auto x : pr.core) {
                ++core_points;
                if (std::binary_search(R.begin(), R.end(), x)) ++bad_shape;
                const Subset* home = nullptr;
                for (const auto& C : clusters)
                    if (std::binary_search(C.begin(), C.end(), x)) home = &C;
                if (!home) {
                    ++bad_shape;
                    continue;
                }
                std::size_t members = 0, kept = 0;
                for (auto y : *home) {
                    if (!std::binary_search(pr.core.begin(), pr.core.end(), y)) continue;
                    ++members;
                    if (y == x || !distorted.contains(x, y)) ++kept;
                }
                if (static_cast<double>(kept) < (1.0 - theta) * static_cast<double>(members)) ++bad_fraction;
            }
        }
    }
    verdict(7, "pruning", bad_fraction == 0 && bad_shape == 0 && bad_observation == 0, t.seconds(), 30,
            fmt("%g realizations, %g core points, fraction violations %g, observation violations %g",
                double(realizations), double(core_points), double(bad_fraction), double(bad_observation)));
    info("pruning emptied the core on %zu realizations; %zu core points outside the clusters or inside R", emptied,
         bad_shape);
}

// Minimum over vertices of the capped simplex.
double vertex_min(const std::vector<double>& g, double eta) {
    const std::size_t n = g.size();
    const auto full = static_cast<std::size_t>(std::floor(1.0 / eta + 1e-12));
    const double rest = 1.0 - static_cast<double>(full) * eta;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != full) continue;
        double base = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) base += eta * g[i];
        if (rest <= 1e-12) best = std::min(best, base);
        else
            for (std::size_t j = 0; j < n; ++j)
                if (!(mask >> j & 1)) best = std::min(best, base + rest * g[j]);
    }
    return best;
}

std::vector<ExtensionInstance> extension_instances() {
    std::vector<ExtensionInstance> out;
    for (std::uint64_t i = 0; i < 50; ++i)
        out.push_back(gen_sparse_expansion_instance(100, 5, 0.05, 0.5, 0.85, 4, derive_seed(kSeed, 8, i)));
    return out;
}

void criterion8(const std::vector<ExtensionInstance>& instances) {
    Timer t;
    std::size_t converged = 0, bad_runs = 0, fallback = 0;
    double worst_fraction = 0.0, worst_saddle = std::numeric_limits<double>::infinity();
    for (const auto& inst : instances) {
        ExtensionOptions opt;
        opt.theta = inst.theta;
        opt.max_iters = 100000;
        const auto sol = robust_extension(inst.X, inst.phiX, inst.u, inst.eps, opt);
        if (sol.fallback) ++fallback;
        worst_fraction = std::max(worst_fraction, sol.violating_fraction(inst.X.size()));
        if (!sol.converged) continue;
        ++converged;
        worst_saddle = std::min(worst_saddle, sol.saddle_value);
        if (sol.violating_fraction(inst.X.size()) > theta_prime(0.5, 0.05) || sol.saddle_value < -kSaddleTol)
            ++bad_runs;
    }
    Rng rng(derive_seed(kSeed, 8, 1000));
    std::size_t oracle_cases = 0, oracle_bad = 0;
    for (std::size_t n = 1; n <= 8; ++n)
        for (double mult : {1.0, 2.0, 4.0}) {
            if (mult > static_cast<double>(n)) continue;
            for (int rep = 0; rep < 50; ++rep) {
                std::vector<double> g(n);
                for (auto& x : g) x = rng.below(4) == 0 ? 1.0 : rng.normal();  // some ties
                const double eta = mult / static_cast<double>(n);
                ++oracle_cases;
                if (std::abs(min_lambda_over_box(g, eta).value - vertex_min(g, std::min(eta, 1.0))) > 1e-12) ++oracle_bad;
            }
        }
    const bool ok = bad_runs == 0 && converged * 10 >= instances.size() * 9 && oracle_bad == 0;
    verdict(8, "robust extension", ok, t.seconds(), 300,
            fmt("converged %g/50, bad converged runs %g, oracle mismatches %g of %g", double(converged),
                double(bad_runs), double(oracle_bad), double(oracle_cases)));
    info("worst violating fraction %.3f (theta' = %.2f), worst converged saddle value %.3e, fallback runs %zu",
         worst_fraction, theta_prime(0.5, 0.05), worst_saddle, fallback);
}

void criterion9(const std::vector<ExtensionInstance>& instances) {
    Timer t;
    std::size_t stated_bad = 0, proven_bad = 0, not_sparse = 0, evaluated = 0;
    for (double p : {1.0, 2.0, 3.0})
        for (const auto& inst : instances) {
            const auto rep = cost_transfer_check(inst.X, inst.phiX, p, 0.05);
            ++evaluated;
            if (!rep.sparse) ++not_sparse;
            if (!rep.stated_holds) ++stated_bad;
            if (!rep.proven_holds) ++proven_bad;
        }
    verdict(9, "cost transfer", stated_bad == 0, t.seconds(), 60,
            fmt("%g checks, violations %g", double(evaluated), double(stated_bad)));
    info("reverse direction cost(phiX) <= F cost(X): %zu violations; non-sparse instances %zu; theta = 0.05 exceeds "
         "4^-(p+1) for p >= 2",
         proven_bad, not_sparse);
}

ExperimentConfig blob_config(double p) {
    ExperimentConfig c;
    c.name = p == 1.0 ? "blobs_p1" : "blobs_p2";
    c.mode = ExperimentMode::preservation;
    c.dataset.generator = "blobs";
    c.dataset.clusters = 2;
    c.dataset.per_cluster = 4;
    c.dataset.m = 10;
    c.family = Family::gaussian;
    c.eps = 0.6;
    c.p = p;
    c.k = 2;
    c.trials = 100;
    c.d_grid = {3, 20, 64};
    c.seed = kSeed;
    c.exhaustive = ExhaustiveMode::on;
    c.workers = workers();
    return c;
}

const DAggregate& aggregate_at(const std::vector<DAggregate>& aggs, std::size_t d) {
    for (const auto& a : aggs)
        if (a.d == d) return a;
    throw std::logic_error("missing d in aggregates");
}

void criterion10() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (double p : {1.0, 2.0}) {
        const auto r = run_preservation(blob_config(p));
        const auto& a3 = aggregate_at(r.aggregates, 3);
        const auto& a20 = aggregate_at(r.aggregates, 20);
        const auto& a64 = aggregate_at(r.aggregates, 64);
        const auto passes = static_cast<std::size_t>(std::llround(a64.pass_fraction * double(a64.trials)));
        ok = ok && a20.q50 < a3.q50 && passes >= 90 && r.exhaustive;
        detail += fmt("p=%g: median dev d=3 %.3f d=20 %.3f, d=64 band %g/100; ", p, a3.q50, a20.q50, double(passes));
        info("p=%g sweep covered %zu clusterings per trial", p, r.clusterings);
    }
    verdict(10, "preservation at desk scale", ok, t.seconds(), 300, detail);
}

ExperimentConfig lower_bound_config(bool orthogonal) {
    ExperimentConfig c;
    c.name = orthogonal ? "lower_bound_orthogonal" : "lower_bound";
    c.mode = ExperimentMode::adversarial;
    c.dataset.generator = "lower_bound";
    c.dataset.pairs = 8;
    c.dataset.gap = 1e3;
    c.dataset.orthogonal = orthogonal;
    c.dataset.m = orthogonal ? 16 : 10;
    c.family = Family::gaussian;
    c.eps = 0.25;
    c.p = 2.0;
    c.k = 15;
    c.trials = 100;
    c.d_grid = {2, 128};
    c.seed = kSeed;
    c.workers = workers();
    return c;
}

struct LowerBoundCounts {
    std::size_t underestimates = 0;
    std::size_t in_band = 0;
    bool exact = false;
};

LowerBoundCounts lower_bound_counts(const AdversarialResult& r) {
    LowerBoundCounts c;
    c.exact = r.exact;
    for (const auto& row : r.rows) {
        if (row.d == 2 && row.opt_original > 1.5 * row.opt_projected) ++c.underestimates;
        if (row.d == 128 && row.opt_ratio >= 1.0 / 1.25 && row.opt_ratio <= 1.25) ++c.in_band;
    }
    return c;
}

void criterion11() {
    Timer t;
    const auto r = run_adversarial(lower_bound_config(false));
    const auto c = lower_bound_counts(r);
    verdict(11, "lower-bound behavior", c.exact && c.underestimates >= 50 && c.in_band >= 90, t.seconds(), 300,
            fmt("d=2 underestimates %g/100 (need 50), d=128 in band %g/100 (need 90)", double(c.underestimates),
                double(c.in_band)));
    const auto o = lower_bound_counts(run_adversarial(lower_bound_config(true)));
    info("orthogonal offsets: d=2 underestimates %zu/100, d=128 in band %zu/100", o.underestimates, o.in_band);
}

void criterion12() {
    Timer t;
    bool ok = true;
    std::string detail;
    auto same = [&](const char* what, const std::string& a, const std::string& b) {
        const bool eq = a == b && !a.empty();
        ok = ok && eq;
        detail += std::string(what) + (eq ? " ok; " : " DIFFERS; ");
    };
    {
        auto c = blob_config(2.0);
        c.workers = 1;
        const auto a = to_csv(run_preservation(c));
        c.workers = 8;
        same("preservation", a, to_csv(run_preservation(c)));
    }
    {
        auto c = lower_bound_config(false);
        c.workers = 1;
        const auto a = to_csv(run_adversarial(c));
        c.workers = 8;
        same("adversarial", a, to_csv(run_adversarial(c)));
    }
    {
        auto c = blob_config(2.0);
        c.mode = ExperimentMode::costbound;
        c.trials = 20;
        c.delta_trials = 500;
        c.workers = 1;
        const auto a = to_csv(run_costbound_audit(c));
        c.workers = 8;
        same("costbound", a, to_csv(run_costbound_audit(c)));
    }
    {
        TailConfig c;
        c.family = Family::gaussian;
        c.m = 64;
        c.d = 10;
        c.trials = 10000;
        c.seed = kSeed;
        c.workers = 1;
        const auto a = tail_curve_csv(make_tail_report(c));
        c.workers = 8;
        same("tails", a, tail_curve_csv(make_tail_report(c)));
    }
    verdict(12, "determinism across workers", ok, t.seconds(), 600, detail);
}

}  // namespace

int main() {
    std::printf("info    seed %llu, %u workers\n", static_cast<unsigned long long>(kSeed), workers());
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    const auto instances = extension_instances();
    criterion8(instances);
    criterion9(instances);
    criterion10();
    criterion11();
    criterion12();
    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
