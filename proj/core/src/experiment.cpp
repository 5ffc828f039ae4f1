#include "dimred/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "dimred/dataset_io.hpp"
#include "dimred/generators.hpp"
#include "dimred/parallel.hpp"
#include "dimred/partitions.hpp"
#include "dimred/random.hpp"
#include "dimred/tailcheck.hpp"
#include "json.hpp"

namespace dimred {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kDatasetStream = 0xda7a;
constexpr std::uint64_t kSamplerStream = 0x5a3b1e;
constexpr std::uint64_t kHeuristicStream = 0x11075;
constexpr std::uint64_t kDeltaStream = 0xde17a;
constexpr std::uint64_t kExhaustiveBudget = 1000000;

std::string fmt(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(v[i]);
    }
    return s;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Checks {
    bool band = true;
    bool ineq8 = true;
    bool ineq9 = true;
};

Checks check_pair(double original, double projected, double eps, double p) {
    Checks c;
    c.band = (1.0 - eps) * original <= projected && projected <= (1.0 + eps) * original;
    c.ineq8 = projected <= std::pow(1.0 + eps, 3.0 * p) * original;
    c.ineq9 = (1.0 - eps) * original <= std::pow(1.0 + eps, 3.0 * p - 1.0) * projected;
    return c;
}

// Candidate clusterings: every partition (as block masks) or an explicit list.
struct Candidates {
    bool exhaustive = false;
    std::size_t n = 0;
    std::size_t k = 1;
    std::vector<std::vector<std::uint32_t>> masks;
    std::vector<Clustering> fixed;

    std::size_t size() const { return exhaustive ? masks.size() : fixed.size(); }

    std::vector<std::size_t> assignment(std::size_t i) const {
        if (!exhaustive) return fixed[i].assignment;
        std::vector<std::size_t> a(n, 0);
        for (std::size_t b = 0; b < masks[i].size(); ++b)
            for (std::size_t x = 0; x < n; ++x)
                if (masks[i][b] & (1u << x)) a[x] = b;
        return a;
    }

    std::vector<double> costs(const Dataset& data, double p) const {
        std::vector<double> out(size());
        if (exhaustive) {
            const auto table = subset_cost_table(data.points, p);
            for (std::size_t i = 0; i < masks.size(); ++i)
                for (auto m : masks[i]) out[i] += table[m];
        } else {
            for (std::size_t i = 0; i < fixed.size(); ++i) out[i] = cost_of_clustering(data, fixed[i], p);
        }
        return out;
    }
};

bool use_exhaustive(const ExperimentConfig& config, std::size_t n) {
    switch (config.exhaustive) {
        case ExhaustiveMode::on:
            if (n > kEnumerationGuard) throw std::invalid_argument("exhaustive mode needs n <= 14");
            return true;
        case ExhaustiveMode::off:
            return false;
        case ExhaustiveMode::automatic:
            break;
    }
    return n <= 10 && count_partitions(n, config.k) <= kExhaustiveBudget;
}

ClusteringResult best_clustering(const Dataset& data, const ExperimentConfig& config, std::uint64_t seed,
                                 bool* exact = nullptr) {
    const std::size_t n = data.size();
    const bool closed_form = config.k + 1 >= n;
    const bool enumerable = n <= kEnumerationGuard && count_partitions(n, config.k) <= kExhaustiveBudget;
    if (exact) *exact = closed_form || enumerable;
    if (closed_form || enumerable) return optimal_clustering_exact(data, config.k, config.p);
    return lloyd_heuristic(data, config.k, config.p, seed, config.heuristic_restarts);
}

Candidates make_candidates(const ExperimentConfig& config, const Dataset& data) {
    Candidates c;
    c.n = data.size();
    c.k = config.k;
    c.exhaustive = use_exhaustive(config, c.n);
    if (c.exhaustive) {
        enumerate_partitions(c.n, c.k, [&](std::span<const std::size_t> rgs) {
            std::vector<std::uint32_t> blocks;
            for (std::size_t x = 0; x < rgs.size(); ++x) {
                if (rgs[x] >= blocks.size()) blocks.resize(rgs[x] + 1, 0);
                blocks[rgs[x]] |= 1u << x;
            }
            c.masks.push_back(std::move(blocks));
        });
        return c;
    }
    // Sampled mode: uniform random assignments, the heuristic optimum, and the
    // generator's labels when they fit in k clusters.
    Rng rng(derive_seed(config.seed, kSamplerStream));
    for (std::size_t s = 0; s < config.sampled_clusterings; ++s) {
        Clustering cl;
        cl.k = config.k;
        cl.assignment.resize(c.n);
        for (auto& a : cl.assignment) a = rng.below(config.k);
        c.fixed.push_back(std::move(cl));
    }
    c.fixed.push_back(best_clustering(data, config, derive_seed(config.seed, kHeuristicStream)).clustering);
    if (!data.labels.empty() && *std::max_element(data.labels.begin(), data.labels.end()) < config.k) {
        Clustering truth;
        truth.k = config.k;
        truth.assignment = data.labels;
        c.fixed.push_back(std::move(truth));
    }
    return c;
}

std::vector<DAggregate> aggregate(const ExperimentConfig& config, const std::vector<double>& value,
                                  const std::vector<char>& pass) {
    std::vector<DAggregate> out;
    const std::size_t T = config.trials;
    for (std::size_t g = 0; g < config.d_grid.size(); ++g) {
        std::vector<double> v;
        std::size_t passed = 0;
        for (std::size_t t = 0; t < T; ++t) {
            v.push_back(value[t * config.d_grid.size() + g]);
            passed += pass[t * config.d_grid.size() + g] ? 1 : 0;
        }
        DAggregate a;
        a.d = config.d_grid[g];
        a.trials = T;
        a.q10 = quantile(v, 0.1);
        a.q50 = quantile(v, 0.5);
        a.q90 = quantile(v, 0.9);
        a.pass_fraction = static_cast<double>(passed) / static_cast<double>(T);
        out.push_back(a);
    }
    return out;
}

json aggregates_json(const std::vector<DAggregate>& aggs) {
    json arr = json::array();
    for (const auto& a : aggs)
        arr.push_back({{"d", a.d},
                       {"trials", a.trials},
                       {"q10", finite_or_null(a.q10)},
                       {"q50", finite_or_null(a.q50)},
                       {"q90", finite_or_null(a.q90)},
                       {"pass_fraction", a.pass_fraction}});
    return arr;
}

Dataset project(const ProjectionMap& map, const Dataset& data) {
    Dataset out = Dataset::from_points(map.apply_all(data.points));
    return out;
}

// Slot index t * |grid| + g so results never depend on the worker count.
template <class Body>
void for_each_trial(const ExperimentConfig& config, Body&& body) {
    const std::size_t G = config.d_grid.size();
    parallel_for(config.trials * G, config.workers, [&](std::size_t slot) {
        const std::size_t t = slot / G;
        const std::size_t g = slot % G;
        const std::size_t d = config.d_grid[g];
        body(slot, t, d, derive_seed(config.seed, t, d));
    });
}

}  // namespace

std::string_view to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::preservation: return "preservation";
        case ExperimentMode::adversarial: return "adversarial";
        case ExperimentMode::costbound: return "costbound";
    }
    return "preservation";
}

ExperimentMode parse_mode(std::string_view name) {
    if (name == "preservation") return ExperimentMode::preservation;
    if (name == "adversarial") return ExperimentMode::adversarial;
    if (name == "costbound") return ExperimentMode::costbound;
    throw std::invalid_argument("unknown experiment mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (d_grid.empty()) throw std::invalid_argument("d_grid must not be empty");
    for (auto d : d_grid)
        if (d == 0) throw std::invalid_argument("target dimensions must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (theorem_mode) {
        if (!(eps < 0.25)) throw std::invalid_argument("theorem mode needs eps in (0, 1/4)");
        if (!(alpha < 0.5)) throw std::invalid_argument("theorem mode needs alpha in (0, 1/2)");
    }
    if (theta && !(*theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (dataset.generator != "blobs" && dataset.generator != "lower_bound" && dataset.generator != "file")
        throw std::invalid_argument("unknown dataset generator '" + dataset.generator + "'");
    if (dataset.generator == "file" && dataset.path.empty()) throw std::invalid_argument("file dataset needs a path");
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + std::string(where));
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j,
               {"name", "mode", "dataset", "family", "eps", "p", "k", "alpha", "trials", "d_grid", "seed",
                "constants", "theta", "theorem_mode", "exhaustive", "sampled_clusterings", "heuristic_restarts",
                "delta_trials", "workers", "output_dir"},
               "config");
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d,
                   {"generator", "clusters", "per_cluster", "m", "spread", "separation", "pairs", "gap",
                    "orthogonal", "path"},
                   "dataset");
        auto& s = c.dataset;
        s.generator = d.value("generator", s.generator);
        s.clusters = d.value("clusters", s.clusters);
        s.per_cluster = d.value("per_cluster", s.per_cluster);
        s.m = d.value("m", s.m);
        s.spread = d.value("spread", s.spread);
        s.separation = d.value("separation", s.separation);
        s.pairs = d.value("pairs", s.pairs);
        s.gap = d.value("gap", s.gap);
        s.orthogonal = d.value("orthogonal", s.orthogonal);
        s.path = d.value("path", s.path);
    }
    if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
    c.eps = j.value("eps", c.eps);
    c.p = j.value("p", c.p);
    c.k = j.value("k", c.k);
    c.alpha = j.value("alpha", c.alpha);
    c.trials = j.value("trials", c.trials);
    if (j.contains("d_grid")) c.d_grid = j.at("d_grid").get<std::vector<std::size_t>>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("constants")) {
        const auto& k = j.at("constants");
        check_keys(k, {"C", "c", "c_prime", "pruning_delta_scale", "core_delta_scale"}, "constants");
        c.constants.C = k.value("C", c.constants.C);
        c.constants.c = k.value("c", c.constants.c);
        if (k.contains("c_prime") && !k.at("c_prime").is_null()) c.constants.c_prime = k.at("c_prime").get<double>();
        c.constants.pruning_delta_scale = k.value("pruning_delta_scale", c.constants.pruning_delta_scale);
        c.constants.core_delta_scale = k.value("core_delta_scale", c.constants.core_delta_scale);
    }
    if (j.contains("theta") && !j.at("theta").is_null()) c.theta = j.at("theta").get<double>();
    c.theorem_mode = j.value("theorem_mode", c.theorem_mode);
    if (j.contains("exhaustive")) {
        const auto& e = j.at("exhaustive");
        if (e.is_boolean()) c.exhaustive = e.get<bool>() ? ExhaustiveMode::on : ExhaustiveMode::off;
        else if (e.get<std::string>() == "auto") c.exhaustive = ExhaustiveMode::automatic;
        else throw std::invalid_argument("exhaustive must be true, false or \"auto\"");
    }
    c.sampled_clusterings = j.value("sampled_clusterings", c.sampled_clusterings);
    c.heuristic_restarts = j.value("heuristic_restarts", c.heuristic_restarts);
    c.delta_trials = j.value("delta_trials", c.delta_trials);
    c.workers = j.value("workers", c.workers);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
}

}  // namespace

ExperimentConfig experiment_config_from_json(std::string_view text) {
    ExperimentConfig c;
    try {
        c = parse_config(json::parse(text));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["mode"] = to_string(c.mode);
    j["dataset"] = {{"generator", c.dataset.generator}, {"clusters", c.dataset.clusters},
                    {"per_cluster", c.dataset.per_cluster}, {"m", c.dataset.m},
                    {"spread", c.dataset.spread}, {"separation", c.dataset.separation},
                    {"pairs", c.dataset.pairs}, {"gap", c.dataset.gap},
                    {"orthogonal", c.dataset.orthogonal}, {"path", c.dataset.path}};
    j["family"] = to_string(c.family);
    j["eps"] = c.eps;
    j["p"] = c.p;
    j["k"] = c.k;
    j["alpha"] = c.alpha;
    j["trials"] = c.trials;
    j["d_grid"] = c.d_grid;
    j["seed"] = c.seed;
    j["constants"] = {{"C", c.constants.C}, {"c", c.constants.c},
                      {"c_prime", c.constants.c_prime ? json(*c.constants.c_prime) : json(nullptr)},
                      {"pruning_delta_scale", c.constants.pruning_delta_scale},
                      {"core_delta_scale", c.constants.core_delta_scale}};
    j["theta"] = c.theta ? json(*c.theta) : json(nullptr);
    j["theorem_mode"] = c.theorem_mode;
    j["exhaustive"] = c.exhaustive == ExhaustiveMode::automatic ? json("auto") : json(c.exhaustive == ExhaustiveMode::on);
    j["sampled_clusterings"] = c.sampled_clusterings;
    j["heuristic_restarts"] = c.heuristic_restarts;
    j["delta_trials"] = c.delta_trials;
    // workers is deliberately not echoed: outputs must not depend on it.
    j["output_dir"] = c.output_dir;
    return j.dump();
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
    if (const char* env = std::getenv("DIMRED_OUTPUT_DIR"); env && *env) return env;
    return config.output_dir;
}

Dataset make_dataset(const ExperimentConfig& config) {
    const auto& s = config.dataset;
    if (s.generator == "blobs")
        return gen_blobs(s.clusters, s.per_cluster, s.m, s.spread, s.separation, derive_seed(config.seed, kDatasetStream));
    if (s.generator == "lower_bound")
        return gen_lower_bound_instance(s.pairs, s.gap, s.m, derive_seed(config.seed, kDatasetStream),
                                        s.orthogonal ? PairOffset::orthogonal : PairOffset::shared);
    return load_dataset(s.path);
}

ThetaChoice theorem_theta(double eps, double p, double alpha) {
    const double second = alpha * std::pow(eps, p) / (6.0 * std::pow(1.0 + eps, p));
    const double scale = std::pow(3.0, (p + 1.0) * (p + 1.0));
    const double base = std::pow(eps, p + 1.0);
    return {std::min(base / scale, second), std::min(base * scale, second)};
}

double cost_bound_A(double eps, double p, double theta) {
    return std::pow(1.0 + eps, 3.0 * p - 2.0) * (1.0 + std::pow(3.0, p + 2.0) * std::pow(theta, 1.0 / (p + 1.0)));
}

double cost_bound_c(double alpha, double eps, double p, double theta) {
    return 3.0 * std::pow(1.0 + eps, p) * theta / (alpha * std::pow(eps, p - 1.0));
}

double delta_requirement(double theta, std::size_t k, double scale) {
    return std::pow(theta, 7.0) / (scale * std::pow(static_cast<double>(k), 6.0));
}

double cost_ratio(double original, double projected) {
    if (original == 0.0) return projected == 0.0 ? 1.0 : kInf;
    return projected / original;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
}

PreservationResult run_preservation(const ExperimentConfig& config) {
    config.validate();
    const auto data = make_dataset(config);
    const auto candidates = make_candidates(config, data);
    const auto original = candidates.costs(data, config.p);

    PreservationResult res;
    res.config = config;
    res.exhaustive = candidates.exhaustive;
    res.clusterings = candidates.size() + (candidates.exhaustive ? 0 : 1);
    res.rows.resize(config.trials * config.d_grid.size());
    for_each_trial(config, [&](std::size_t slot, std::size_t t, std::size_t d, std::uint64_t map_seed) {
        const auto map = sample_map(config.family, data.dim, d, map_seed);
        const auto projected_data = project(map, data);
        auto projected = candidates.costs(projected_data, config.p);
        auto orig = original;
        std::vector<Clustering> extra;
        if (!candidates.exhaustive) {
            extra.push_back(best_clustering(projected_data, config, derive_seed(map_seed, kHeuristicStream)).clustering);
            orig.push_back(cost_of_clustering(data, extra.back(), config.p));
            projected.push_back(cost_of_clustering(projected_data, extra.back(), config.p));
        }
        auto& row = res.rows[slot];
        row.trial = t;
        row.d = d;
        row.map_seed = map_seed;
        row.max_ratio = -kInf;
        row.max_inverse = -kInf;
        std::size_t hi = 0, lo = 0;
        for (std::size_t i = 0; i < orig.size(); ++i) {
            const double r = cost_ratio(orig[i], projected[i]);
            const double inv = cost_ratio(projected[i], orig[i]);
            if (r > row.max_ratio) {
                row.max_ratio = r;
                hi = i;
            }
            if (inv > row.max_inverse) {
                row.max_inverse = inv;
                lo = i;
            }
            const auto c = check_pair(orig[i], projected[i], config.eps, config.p);
            row.band = row.band && c.band;
            row.ineq8 = row.ineq8 && c.ineq8;
            row.ineq9 = row.ineq9 && c.ineq9;
        }
        row.deviation = std::max(row.max_ratio, row.max_inverse) - 1.0;
        auto witness = [&](std::size_t i) {
            return i < candidates.size() ? candidates.assignment(i) : extra[i - candidates.size()].assignment;
        };
        row.worst_high = witness(hi);
        row.worst_low = witness(lo);
    });

    std::vector<double> dev;
    std::vector<char> pass;
    for (const auto& r : res.rows) {
        dev.push_back(r.deviation);
        pass.push_back(r.band);
    }
    res.aggregates = aggregate(config, dev, pass);
    for (const auto& a : res.aggregates)
        if (a.pass_fraction >= 1.0 - config.alpha && (!res.smallest_passing_d || a.d < *res.smallest_passing_d))
            res.smallest_passing_d = a.d;
    return res;
}

AdversarialResult run_adversarial(const ExperimentConfig& config) {
    config.validate();
    const auto data = make_dataset(config);
    AdversarialResult res;
    res.config = config;
    const double opt_original = best_clustering(data, config, derive_seed(config.seed, kHeuristicStream), &res.exact).cost;
    res.rows.resize(config.trials * config.d_grid.size());
    for_each_trial(config, [&](std::size_t slot, std::size_t t, std::size_t d, std::uint64_t map_seed) {
        const auto map = sample_map(config.family, data.dim, d, map_seed);
        const auto projected_data = project(map, data);
        const auto chosen = best_clustering(projected_data, config, derive_seed(map_seed, kHeuristicStream));
        auto& row = res.rows[slot];
        row.trial = t;
        row.d = d;
        row.map_seed = map_seed;
        row.opt_original = opt_original;
        row.opt_projected = chosen.cost;
        row.opt_ratio = cost_ratio(opt_original, chosen.cost);
        row.cost_original = cost_of_clustering(data, chosen.clustering, config.p);
        row.ratio = cost_ratio(row.cost_original, chosen.cost);
        const auto c = check_pair(row.cost_original, chosen.cost, config.eps, config.p);
        row.band = c.band;
        row.ineq8 = c.ineq8;
        row.ineq9 = c.ineq9;
    });
    std::vector<double> ratio;
    std::vector<char> pass;
    for (const auto& r : res.rows) {
        ratio.push_back(r.opt_ratio);
        pass.push_back(r.ineq8 && r.ineq9);
    }
    res.aggregates = aggregate(config, ratio, pass);
    for (const auto& a : res.aggregates) res.failure_rate.push_back(1.0 - a.pass_fraction);
    return res;
}

CostBoundResult run_costbound_audit(const ExperimentConfig& config) {
    config.validate();
    const auto data = make_dataset(config);
    const auto candidates = make_candidates(config, data);
    const auto original = candidates.costs(data, config.p);

    CostBoundResult res;
    res.config = config;
    const auto choice = theorem_theta(config.eps, config.p, config.alpha);
    res.theta = config.theta ? *config.theta : choice.theta;
    res.theta_literal = choice.literal;
    res.A = cost_bound_A(config.eps, config.p, res.theta);
    res.c = cost_bound_c(config.alpha, config.eps, config.p, res.theta);
    const auto star = best_clustering(data, config, derive_seed(config.seed, kHeuristicStream));
    res.optimal_cost = star.cost;

    for (std::size_t d : config.d_grid) {
        const auto est = estimate_delta(config.family, data.dim, d, config.eps, std::max<std::size_t>(config.delta_trials, 100),
                                        derive_seed(config.seed, kDeltaStream, d), config.workers);
        res.delta_hat.push_back(est.value);
        res.delta_std_error.push_back(est.std_error);
    }

    const double A = res.A, c = res.c, cstar = res.optimal_cost;
    res.rows.resize(config.trials * config.d_grid.size());
    for_each_trial(config, [&](std::size_t slot, std::size_t t, std::size_t d, std::uint64_t map_seed) {
        const auto map = sample_map(config.family, data.dim, d, map_seed);
        const auto projected_data = project(map, data);
        auto projected = candidates.costs(projected_data, config.p);
        auto orig = original;
        // The adversarial choice is always audited as well.
        const auto chosen = best_clustering(projected_data, config, derive_seed(map_seed, kHeuristicStream));
        orig.push_back(cost_of_clustering(data, chosen.clustering, config.p));
        projected.push_back(chosen.cost);
        auto& row = res.rows[slot];
        row.trial = t;
        row.d = d;
        row.map_seed = map_seed;
        row.clusterings = orig.size();
        for (std::size_t i = 0; i < orig.size(); ++i) {
            const double up_bound = A * (orig[i] + c * cstar);
            const double low_bound = A * (projected[i] + c * cstar);
            row.upper_holds = row.upper_holds && projected[i] <= up_bound;
            row.lower_holds = row.lower_holds && orig[i] <= low_bound;
            row.worst_upper = std::max(row.worst_upper, cost_ratio(up_bound, projected[i]));
            row.worst_lower = std::max(row.worst_lower, cost_ratio(low_bound, orig[i]));
        }
    });

    std::vector<double> worst;
    std::vector<char> pass;
    for (const auto& r : res.rows) {
        worst.push_back(std::max(r.worst_upper, r.worst_lower));
        pass.push_back(r.upper_holds && r.lower_holds);
    }
    res.aggregates = aggregate(config, worst, pass);
    const double pairs = static_cast<double>(config.k) * static_cast<double>(config.k - 1) / 2.0;
    for (std::size_t g = 0; g < config.d_grid.size(); ++g) {
        const double rate = 1.0 - res.aggregates[g].pass_fraction;
        const double sigma = std::sqrt(rate * (1.0 - rate) / static_cast<double>(config.trials));
        const double bound = config.alpha + pairs * res.delta_hat[g];
        res.violation_rate.push_back(rate);
        res.violation_bound.push_back(bound);
        res.within_bound.push_back(rate <= bound + 3.0 * sigma);
    }
    return res;
}

std::string to_csv(const PreservationResult& r) {
    std::string out = "seed,trial,d,map_seed,max_ratio,max_inverse,deviation,band,ineq8,ineq9,worst_high,worst_low\n";
    for (const auto& row : r.rows) {
        out += std::to_string(r.config.seed) + ',' + std::to_string(row.trial) + ',' + std::to_string(row.d) + ',' +
               std::to_string(row.map_seed) + ',' + fmt(row.max_ratio) + ',' + fmt(row.max_inverse) + ',' +
               fmt(row.deviation) + ',' + (row.band ? "1" : "0") + ',' + (row.ineq8 ? "1" : "0") + ',' +
               (row.ineq9 ? "1" : "0") + ',' + join(row.worst_high) + ',' + join(row.worst_low) + '\n';
    }
    return out;
}

std::string to_csv(const AdversarialResult& r) {
    std::string out = "seed,trial,d,map_seed,opt_original,opt_projected,opt_ratio,cost_original,ratio,band,ineq8,ineq9\n";
    for (const auto& row : r.rows) {
        out += std::to_string(r.config.seed) + ',' + std::to_string(row.trial) + ',' + std::to_string(row.d) + ',' +
               std::to_string(row.map_seed) + ',' + fmt(row.opt_original) + ',' + fmt(row.opt_projected) + ',' +
               fmt(row.opt_ratio) + ',' + fmt(row.cost_original) + ',' + fmt(row.ratio) + ',' +
               (row.band ? "1" : "0") + ',' + (row.ineq8 ? "1" : "0") + ',' + (row.ineq9 ? "1" : "0") + '\n';
    }
    return out;
}

std::string to_csv(const CostBoundResult& r) {
    std::string out = "seed,trial,d,map_seed,clusterings,upper_holds,lower_holds,worst_upper,worst_lower\n";
    for (const auto& row : r.rows) {
        out += std::to_string(r.config.seed) + ',' + std::to_string(row.trial) + ',' + std::to_string(row.d) + ',' +
               std::to_string(row.map_seed) + ',' + std::to_string(row.clusterings) + ',' +
               (row.upper_holds ? "1" : "0") + ',' + (row.lower_holds ? "1" : "0") + ',' + fmt(row.worst_upper) +
               ',' + fmt(row.worst_lower) + '\n';
    }
    return out;
}

std::string to_json(const PreservationResult& r) {
    json j;
    j["kind"] = "preservation";
    j["config"] = json::parse(to_json(r.config));
    j["seed"] = r.config.seed;
    j["exhaustive"] = r.exhaustive;
    j["clusterings"] = r.clusterings;
    j["aggregates"] = aggregates_json(r.aggregates);
    j["smallest_passing_d"] = r.smallest_passing_d ? json(*r.smallest_passing_d) : json(nullptr);
    return j.dump(2);
}

std::string to_json(const AdversarialResult& r) {
    json j;
    j["kind"] = "adversarial";
    j["config"] = json::parse(to_json(r.config));
    j["seed"] = r.config.seed;
    j["exact"] = r.exact;
    j["aggregates"] = aggregates_json(r.aggregates);
    j["failure_rate"] = r.failure_rate;
    return j.dump(2);
}

std::string to_json(const CostBoundResult& r) {
    json j;
    j["kind"] = "costbound";
    j["config"] = json::parse(to_json(r.config));
    j["seed"] = r.config.seed;
    j["theta"] = r.theta;
    j["theta_literal_reading"] = r.theta_literal;
    j["A"] = r.A;
    j["c"] = r.c;
    j["optimal_cost"] = r.optimal_cost;
    j["delta_hat"] = r.delta_hat;
    j["delta_std_error"] = r.delta_std_error;
    j["violation_rate"] = r.violation_rate;
    j["violation_bound"] = r.violation_bound;
    j["within_bound"] = r.within_bound;
    j["aggregates"] = aggregates_json(r.aggregates);
    return j.dump(2);
}

std::vector<DAggregate> aggregates_from_json(std::string_view text) {
    const auto j = json::parse(text);
    auto num = [](const json& v) { return v.is_null() ? kInf : v.get<double>(); };
    std::vector<DAggregate> out;
    for (const auto& a : j.at("aggregates")) {
        DAggregate g;
        g.d = a.at("d").get<std::size_t>();
        g.trials = a.at("trials").get<std::size_t>();
        g.q10 = num(a.at("q10"));
        g.q50 = num(a.at("q50"));
        g.q90 = num(a.at("q90"));
        g.pass_fraction = a.at("pass_fraction").get<double>();
        out.push_back(g);
    }
    return out;
}

}  // namespace dimred
