#include "dimred/corelemma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dimred/parallel.hpp"
#include "json.hpp"

namespace dimred {

namespace {

constexpr double kProbTolerance = 1e-12;
// Relative slack when comparing mu against 1/|C \ R|; mu is a sum of floats.
constexpr double kMeasureSlack = 1e-12;

void check_subset(const Subset& s, std::size_t n) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= n) throw std::invalid_argument("subset element out of range");
        if (i && s[i] <= s[i - 1]) throw std::invalid_argument("subset must be sorted without duplicates");
    }
}

void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 0.5)) throw std::invalid_argument("theta must lie in (0, 1/2)");
}

// |C| < theta * |X| decided exactly: the product of a double and an integer
// below 2^11 fits the 64-bit long double mantissa.
bool is_small(std::size_t c, std::size_t x, double theta) {
    return static_cast<long double>(c) < static_cast<long double>(theta) * static_cast<long double>(x);
}

Subset set_difference(const Subset& a, const Subset& b) {
    Subset out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Subset set_union(const Subset& a, const Subset& b) {
    Subset out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Subset set_intersection(const Subset& a, const Subset& b) {
    Subset out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// One level of the recursion on ground set X (sorted) and realizations C.
// Adds into mu and fills R (one entry per realization).
void recurse(const Subset& X, const std::vector<Subset>& C, std::span<const double> prob, double theta,
             std::vector<double>& mu, std::vector<Subset>& R) {
    R.assign(C.size(), Subset{});
    if (X.empty()) return;

    const double l = theta * static_cast<double>(X.size());
    std::vector<char> small(C.size());
    std::vector<double> q(mu.size(), 0.0);
    for (std::size_t j = 0; j < C.size(); ++j) {
        small[j] = is_small(C[j].size(), X.size(), theta);
        if (small[j])
            for (auto x : C[j]) q[x] += prob[j];
    }
    Subset next;
    for (auto x : X)
        if (q[x] >= 2.0 * theta) next.push_back(x);

    std::vector<Subset> next_C(C.size());
    for (std::size_t j = 0; j < C.size(); ++j)
        if (small[j]) next_C[j] = set_intersection(C[j], next);

    std::vector<Subset> next_R;
    recurse(next, next_C, prob, theta, mu, next_R);

    for (auto x : X) mu[x] += 1.0 / l;
    for (std::size_t j = 0; j < C.size(); ++j)
        R[j] = small[j] ? set_union(next_R[j], set_difference(C[j], next)) : std::move(next_R[j]);
}

std::vector<double> probabilities(const SubsetDistribution& dist) {
    std::vector<double> p;
    for (const auto& a : dist.support) p.push_back(a.prob);
    return p;
}

std::vector<Subset> subsets(const SubsetDistribution& dist) {
    std::vector<Subset> s;
    for (const auto& a : dist.support) s.push_back(a.subset);
    return s;
}

MeasureResult padded_impl(const SubsetDistribution& dist, double theta) {
    const auto marginal = dist.marginals();
    Subset kept;
    for (std::size_t x = 0; x < dist.ground_size; ++x)
        if (marginal[x] >= 2.0 * theta) kept.push_back(x);

    std::vector<Subset> restricted;
    for (const auto& a : dist.support) restricted.push_back(set_intersection(a.subset, kept));

    MeasureResult out;
    out.theta = theta;
    out.kind = MeasureKind::padded;
    out.mu.assign(dist.ground_size, 0.0);
    const auto prob = probabilities(dist);
    recurse(kept, restricted, prob, theta, out.mu, out.R_of);
    for (std::size_t j = 0; j < dist.support.size(); ++j)
        out.R_of[j] = set_union(out.R_of[j], set_difference(dist.support[j].subset, kept));
    return out;
}

// Condition 1 on one realization; returns the first violating element.
std::optional<MeasureWitness> condition1(const Subset& C, const Subset& R, std::span<const double> mu,
                                         std::size_t atom) {
    const auto free = set_difference(C, R);
    if (free.empty()) return std::nullopt;
    const double required = 1.0 / static_cast<double>(free.size());
    for (auto x : free)
        if (mu[x] + kMeasureSlack * required < required) return MeasureWitness{atom, x, mu[x], required};
    return std::nullopt;
}

}  // namespace

void SubsetDistribution::validate() const {
    if (support.empty()) throw std::invalid_argument("distribution support is empty");
    double total = 0.0;
    for (const auto& a : support) {
        check_subset(a.subset, ground_size);
        if (!(a.prob >= 0.0)) throw std::invalid_argument("probabilities must be nonnegative");
        total += a.prob;
    }
    if (std::abs(total - 1.0) > kProbTolerance) throw std::invalid_argument("probabilities must sum to 1");
}

std::vector<double> SubsetDistribution::marginals() const {
    std::vector<double> m(ground_size, 0.0);
    for (const auto& a : support)
        for (auto x : a.subset) m[x] += a.prob;
    return m;
}

double SubsetDistribution::prob_nonempty() const {
    double p = 0.0;
    for (const auto& a : support)
        if (!a.subset.empty()) p += a.prob;
    return p;
}

void PartialClusteringDistribution::validate() const {
    if (support.empty()) throw std::invalid_argument("distribution support is empty");
    if (k == 0) throw std::invalid_argument("k must be positive");
    double total = 0.0;
    for (const auto& a : support) {
        if (a.clusters.size() != k) throw std::invalid_argument("every atom needs exactly k clusters");
        std::vector<char> seen(ground_size, 0);
        for (const auto& c : a.clusters) {
            check_subset(c, ground_size);
            for (auto x : c) {
                if (seen[x]) throw std::invalid_argument("clusters within an atom must be disjoint");
                seen[x] = 1;
            }
        }
        if (!(a.prob >= 0.0)) throw std::invalid_argument("probabilities must be nonnegative");
        total += a.prob;
    }
    if (std::abs(total - 1.0) > kProbTolerance) throw std::invalid_argument("probabilities must sum to 1");
}

SubsetDistribution PartialClusteringDistribution::cluster(std::size_t i) const {
    SubsetDistribution d;
    d.ground_size = ground_size;
    for (const auto& a : support) d.support.push_back({a.clusters.at(i), a.prob});
    return d;
}

double MeasureResult::total() const { return std::accumulate(mu.begin(), mu.end(), 0.0); }

HypothesisViolation::HypothesisViolation(std::size_t element_, double marginal_, double theta)
    : std::invalid_argument("Pr(x in C) = " + std::to_string(marginal_) + " < 2*theta = " +
                            std::to_string(2.0 * theta) + " for element " + std::to_string(element_)),
      element(element_),
      marginal(marginal_) {}

MeasureResult build_measure(const SubsetDistribution& dist, double theta) {
    check_theta(theta);
    dist.validate();
    const auto marginal = dist.marginals();
    for (std::size_t x = 0; x < dist.ground_size; ++x)
        if (marginal[x] < 2.0 * theta) throw HypothesisViolation(x, marginal[x], theta);

    MeasureResult out;
    out.theta = theta;
    out.kind = MeasureKind::lemma;
    out.mu.assign(dist.ground_size, 0.0);
    Subset all(dist.ground_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    recurse(all, subsets(dist), probabilities(dist), theta, out.mu, out.R_of);
    return out;
}

MeasureResult build_measure_padded(const SubsetDistribution& dist, double theta) {
    check_theta(theta);
    dist.validate();
    return padded_impl(dist, theta);
}

MeasureResult build_measure_clustering(const PartialClusteringDistribution& dist, double theta) {
    check_theta(theta);
    dist.validate();
    const double part = theta / (2.0 * static_cast<double>(dist.k));
    MeasureResult out;
    out.theta = theta;
    out.kind = MeasureKind::clustering;
    out.k = dist.k;
    out.mu.assign(dist.ground_size, 0.0);
    out.R_of.assign(dist.support.size(), Subset{});
    for (std::size_t i = 0; i < dist.k; ++i) {
        const auto piece = padded_impl(dist.cluster(i), part);
        for (std::size_t x = 0; x < dist.ground_size; ++x) out.mu[x] += piece.mu[x];
        for (std::size_t j = 0; j < dist.support.size(); ++j) out.R_of[j] = set_union(out.R_of[j], piece.R_of[j]);
    }
    return out;
}

MeasureReport verify_measure(const SubsetDistribution& dist, const MeasureResult& result) {
    if (result.R_of.size() != dist.support.size() || result.mu.size() != dist.ground_size)
        throw std::invalid_argument("measure does not match the distribution");
    MeasureReport rep;
    std::vector<double> in_R(dist.ground_size, 0.0);
    for (std::size_t j = 0; j < dist.support.size(); ++j) {
        const auto& C = dist.support[j].subset;
        const auto& R = result.R_of[j];
        if (!std::includes(C.begin(), C.end(), R.begin(), R.end())) {
            rep.subset_ok = false;
            if (!rep.witness) rep.witness = MeasureWitness{j, R.empty() ? 0 : R.front(), 0.0, 0.0};
        }
        if (auto w = condition1(C, R, result.mu, j)) {
            rep.condition1 = false;
            if (!rep.witness) rep.witness = w;
        }
        for (auto x : R) in_R[x] += dist.support[j].prob;
    }
    rep.max_marginal_R = in_R.empty() ? 0.0 : *std::max_element(in_R.begin(), in_R.end());
    rep.condition2_bound = 2.0 * result.theta;
    rep.condition2 = rep.max_marginal_R <= rep.condition2_bound + kProbTolerance;
    if (result.kind == MeasureKind::lemma) rep.condition2_header = rep.max_marginal_R <= result.theta + kProbTolerance;
    rep.mu_total = result.total();
    rep.condition3_bound = dist.prob_nonempty() / (result.theta * result.theta);
    rep.condition3 = rep.mu_total <= rep.condition3_bound * (1.0 + kMeasureSlack);
    return rep;
}

MeasureReport verify_measure(const PartialClusteringDistribution& dist, const MeasureResult& result) {
    if (result.R_of.size() != dist.support.size() || result.mu.size() != dist.ground_size)
        throw std::invalid_argument("measure does not match the distribution");
    MeasureReport rep;
    std::vector<double> in_R(dist.ground_size, 0.0);
    for (std::size_t j = 0; j < dist.support.size(); ++j) {
        const auto& R = result.R_of[j];
        Subset covered;
        for (const auto& C : dist.support[j].clusters) {
            covered = set_union(covered, C);
            if (auto w = condition1(C, R, result.mu, j)) {
                rep.condition1 = false;
                if (!rep.witness) rep.witness = w;
            }
        }
        if (!std::includes(covered.begin(), covered.end(), R.begin(), R.end())) {
            rep.subset_ok = false;
            if (!rep.witness) rep.witness = MeasureWitness{j, R.empty() ? 0 : R.front(), 0.0, 0.0};
        }
        for (auto x : R) in_R[x] += dist.support[j].prob;
    }
    rep.max_marginal_R = in_R.empty() ? 0.0 : *std::max_element(in_R.begin(), in_R.end());
    rep.condition2_bound = result.theta;
    rep.condition2 = rep.max_marginal_R <= rep.condition2_bound + kProbTolerance;
    const double k = static_cast<double>(dist.k);
    rep.mu_total = result.total();
    rep.condition3_bound = 4.0 * k * k * k / (result.theta * result.theta);
    rep.condition3 = rep.mu_total <= rep.condition3_bound * (1.0 + kMeasureSlack);
    return rep;
}

bool check_observation(std::span<const Subset> clusters, const Subset& R, std::span<const double> mu) {
    for (const auto& C : clusters) {
        const auto free = set_difference(C, R);
        if (free.size() > 20) throw std::invalid_argument("observation check limited to 20 free elements");
        const std::size_t masks = std::size_t{1} << free.size();
        const double size = static_cast<double>(free.size());
        for (std::size_t mask = 1; mask < masks; ++mask) {
            double mass = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < free.size(); ++i)
                if (mask & (std::size_t{1} << i)) {
                    mass += mu[free[i]];
                    ++count;
                }
            const double lhs = static_cast<double>(count);
            if (lhs > mass * size * (1.0 + kMeasureSlack)) return false;
        }
    }
    return true;
}

PairRelation::PairRelation(std::size_t n) : n_(n), bits_(n * n, 0) {}

void PairRelation::insert(std::size_t a, std::size_t b) {
    if (a >= n_ || b >= n_) throw std::out_of_range("pair index out of range");
    if (a == b) return;
    bits_[a * n_ + b] = 1;
    bits_[b * n_ + a] = 1;
}

bool PairRelation::contains(std::size_t a, std::size_t b) const { return bits_[a * n_ + b] != 0; }

std::size_t PairRelation::pair_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)) / 2;
}

PruneResult prune(std::size_t n, std::span<const Subset> clusters, const PairRelation& distorted,
                  std::span<const double> mu, const Subset& R, double theta) {
    if (distorted.size() != n || mu.size() != n) throw std::invalid_argument("prune: size mismatch");
    PruneResult out;
    out.alpha = theta / (1.0 + theta);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (distorted.contains(x, y)) out.mu_pair_mass += mu[x] * mu[y];
    if (out.mu_pair_mass >= out.alpha * out.alpha) {
        out.emptied = true;
        return out;
    }
    for (const auto& C : clusters) {
        const auto free = set_difference(C, R);
        for (auto x : free) {
            double mass = 0.0;
            for (auto y : free)
                if (distorted.contains(x, y)) mass += mu[y];
            if (mass >= out.alpha) out.bad.push_back(x);
            else out.core.push_back(x);
        }
    }
    std::sort(out.core.begin(), out.core.end());
    std::sort(out.bad.begin(), out.bad.end());
    return out;
}

double preserved_fraction(std::size_t x, std::span<const Subset> clusters, const Subset& core,
                          const PairRelation& distorted) {
    for (const auto& C : clusters) {
        if (!std::binary_search(C.begin(), C.end(), x)) continue;
        const auto members = set_intersection(C, core);
        if (members.empty()) return 1.0;
        std::size_t kept = 0;
        for (auto y : members)
            if (!distorted.contains(x, y)) ++kept;
        return static_cast<double>(kept) / static_cast<double>(members.size());
    }
    return 1.0;
}

CoreVerdict verify_core(const Dataset& data, const Clustering& clustering, std::span<const Vector> centers,
                        std::span<const ProjectionMap> maps, double eps, double theta, unsigned workers) {
    const std::size_t n = data.size();
    clustering.validate(n);
    if (centers.size() != clustering.k) throw std::invalid_argument("need one center per cluster");
    if (maps.empty()) throw std::invalid_argument("verify_core needs at least one trial");
    const std::size_t T = maps.size();
    const auto base = clustering.members();

    struct TrialData {
        std::vector<Subset> clusters;
        PairRelation distorted;
    };
    std::vector<TrialData> per(T);
    parallel_for(T, workers, [&](std::size_t t) {
        const auto images = maps[t].apply_all(data.points);
        const auto center_images = maps[t].apply_all(centers);
        std::vector<char> in_Y(n, 1);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t i = 0; i < centers.size(); ++i)
                if (!classify_images(data.points[x], centers[i], images[x], center_images[i], eps).preserved) {
                    in_Y[x] = 0;
                    break;
                }
        per[t].clusters.resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            for (auto x : base[i])
                if (in_Y[x]) per[t].clusters[i].push_back(x);
        per[t].distorted = PairRelation(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (!classify_images(data.points[a], data.points[b], images[a], images[b], eps).preserved)
                    per[t].distorted.insert(a, b);
    });

    PartialClusteringDistribution dist;
    dist.ground_size = n;
    dist.k = clustering.k;
    for (std::size_t t = 0; t < T; ++t) dist.support.push_back({per[t].clusters, 1.0 / static_cast<double>(T)});
    // Uniform weights may miss 1 by a few ulps for large T.
    double total = 0.0;
    for (const auto& a : dist.support) total += a.prob;
    dist.support.back().prob += 1.0 - total;
    const auto measure = build_measure_clustering(dist, theta / 3.0);

    CoreVerdict v;
    v.eps = eps;
    v.theta = theta;
    v.trials.resize(T);
    parallel_for(T, workers, [&](std::size_t t) {
        const auto pr = prune(n, per[t].clusters, per[t].distorted, measure.mu, measure.R_of[t], theta);
        auto& trial = v.trials[t];
        trial.core = pr.core;
        trial.emptied = pr.emptied;
        for (const auto& c : per[t].clusters) trial.preserved_center_points += c.size();
        for (auto x : pr.core) {
            trial.min_preserved_fraction =
                std::min(trial.min_preserved_fraction, preserved_fraction(x, per[t].clusters, pr.core, per[t].distorted));
            // Core points are drawn from Y, so this only fails if pruning leaks.
            bool inY = false;
            for (const auto& c : per[t].clusters) inY = inY || std::binary_search(c.begin(), c.end(), x);
            trial.centers_preserved = trial.centers_preserved && inY;
        }
    });

    v.excluded_rate.assign(n, 0.0);
    v.excluded_std_error.assign(n, 0.0);
    for (const auto& trial : v.trials) {
        std::vector<char> in(n, 0);
        for (auto x : trial.core) in[x] = 1;
        for (std::size_t x = 0; x < n; ++x)
            if (!in[x]) v.excluded_rate[x] += 1.0;
        v.within_cluster_ok = v.within_cluster_ok && trial.min_preserved_fraction >= 1.0 - theta;
        v.centers_ok = v.centers_ok && trial.centers_preserved;
    }
    for (std::size_t x = 0; x < n; ++x) {
        const double p = v.excluded_rate[x] / static_cast<double>(T);
        v.excluded_rate[x] = p;
        v.excluded_std_error[x] = std::sqrt(p * (1.0 - p) / static_cast<double>(T));
        v.marginal_ok = v.marginal_ok && p <= theta + 3.0 * v.excluded_std_error[x];
        v.max_excluded_rate = std::max(v.max_excluded_rate, p);
    }
    return v;
}

std::string to_json(const SubsetDistribution& dist) {
    nlohmann::json j;
    j["elements"] = dist.ground_size;
    j["support"] = nlohmann::json::array();
    for (const auto& a : dist.support) j["support"].push_back({{"subset", a.subset}, {"prob", a.prob}});
    return j.dump();
}

SubsetDistribution subset_distribution_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    SubsetDistribution d;
    const auto& el = j.at("elements");
    d.ground_size = el.is_array() ? el.size() : el.get<std::size_t>();
    for (const auto& a : j.at("support")) {
        auto s = a.at("subset").get<Subset>();
        std::sort(s.begin(), s.end());
        d.support.push_back({std::move(s), a.at("prob").get<double>()});
    }
    d.validate();
    return d;
}

std::string to_json(const PartialClusteringDistribution& dist) {
    nlohmann::json j;
    j["elements"] = dist.ground_size;
    j["k"] = dist.k;
    j["support"] = nlohmann::json::array();
    for (const auto& a : dist.support) j["support"].push_back({{"clusters", a.clusters}, {"prob", a.prob}});
    return j.dump();
}

PartialClusteringDistribution partial_clustering_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    PartialClusteringDistribution d;
    const auto& el = j.at("elements");
    d.ground_size = el.is_array() ? el.size() : el.get<std::size_t>();
    d.k = j.at("k").get<std::size_t>();
    for (const auto& a : j.at("support")) {
        auto clusters = a.at("clusters").get<std::vector<Subset>>();
        for (auto& c : clusters) std::sort(c.begin(), c.end());
        d.support.push_back({std::move(clusters), a.at("prob").get<double>()});
    }
    d.validate();
    return d;
}

std::string to_json(const MeasureResult& result) {
    static constexpr const char* kinds[] = {"lemma", "padded", "clustering"};
    nlohmann::json j;
    j["kind"] = kinds[static_cast<int>(result.kind)];
    j["theta"] = result.theta;
    j["k"] = result.k;
    j["mu"] = result.mu;
    j["R"] = result.R_of;
    j["mu_total"] = result.total();
    return j.dump();
}

std::string to_json(const MeasureReport& r) {
    nlohmann::json j;
    j["passed"] = r.passed();
    j["subset_ok"] = r.subset_ok;
    j["condition1"] = r.condition1;
    j["condition2"] = r.condition2;
    j["condition3"] = r.condition3;
    j["max_marginal_R"] = r.max_marginal_R;
    j["condition2_bound"] = r.condition2_bound;
    if (r.condition2_header) j["condition2_theta_bound"] = *r.condition2_header;
    j["mu_total"] = r.mu_total;
    j["condition3_bound"] = r.condition3_bound;
    if (r.witness)
        j["witness"] = {{"atom", r.witness->atom},
                        {"element", r.witness->element},
                        {"value", r.witness->value},
                        {"required", r.witness->required}};
    return j.dump();
}

std::string to_json(const CoreVerdict& v) {
    nlohmann::json j;
    j["eps"] = v.eps;
    j["theta"] = v.theta;
    j["passed"] = v.passed();
    j["within_cluster_ok"] = v.within_cluster_ok;
    j["centers_ok"] = v.centers_ok;
    j["marginal_ok"] = v.marginal_ok;
    j["max_excluded_rate"] = v.max_excluded_rate;
    j["excluded_rate"] = v.excluded_rate;
    j["excluded_std_error"] = v.excluded_std_error;
    j["trials"] = nlohmann::json::array();
    for (const auto& t : v.trials)
        j["trials"].push_back({{"core", t.core},
                               {"y_size", t.preserved_center_points},
                               {"emptied", t.emptied},
                               {"min_preserved_fraction", t.min_preserved_fraction}});
    return j.dump();
}

}  // namespace dimred
