#include "dimred/clustering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dimred/random.hpp"

namespace dimred {

Dataset Dataset::from_points(std::vector<Vector> points) {
    Dataset data;
    data.dim = points.empty() ? 0 : points.front().size();
    data.points = std::move(points);
    data.validate();
    return data;
}

void Dataset::validate() const {
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("dataset points must share one dimension");
    if (!ids.empty() && ids.size() != points.size())
        throw std::invalid_argument("dataset ids must match the number of points");
    if (!labels.empty() && labels.size() != points.size())
        throw std::invalid_argument("dataset labels must match the number of points");
}

void Clustering::validate(std::size_t n) const {
    if (k == 0) throw std::invalid_argument("clustering needs k >= 1");
    if (assignment.size() != n) throw std::invalid_argument("assignment length must equal the number of points");
    for (auto a : assignment)
        if (a >= k) throw std::invalid_argument("cluster index out of range");
}

std::vector<std::vector<std::size_t>> Clustering::members() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
    return out;
}

std::size_t Clustering::empty_clusters() const {
    std::size_t empty = 0;
    for (const auto& m : members())
        if (m.empty()) ++empty;
    return empty;
}

double weighted_power_cost(std::span<const Vector> points, std::span<const double> weights,
                           std::span<const double> center, double p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (w == 0.0) continue;
        const double r2 = squared_distance(points[i], center);
        if (p == 2.0)
            sum += w * r2;
        else if (p == 1.0)
            sum += w * std::sqrt(r2);
        else
            sum += w * std::pow(r2, 0.5 * p);
    }
    return sum;
}

namespace {

CenterResult weighted_mean(std::span<const Vector> points, std::span<const double> weights, double total) {
    CenterResult result;
    const std::size_t dim = points.front().size();
    // Shifted by the first point so coincident points give an exact center.
    const Vector& origin = points.front();
    Vector shift(dim, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        for (std::size_t j = 0; j < dim; ++j) shift[j] += w * (points[i][j] - origin[j]);
    }
    result.center = origin;
    for (std::size_t j = 0; j < dim; ++j) result.center[j] += shift[j] / total;
    return result;
}

// One reweighted fixed-point proposal: T = sum a_i x_i / sum a_i with
// a_i = w_i r_i^(p-2), skipping points that coincide with the center.
// For p = 1 at a data point it applies the Vardi-Zhang correction and reports
// optimality when the subgradient condition holds.
struct Proposal {
    Vector target;
    bool optimal = false;
};

Proposal propose(std::span<const Vector> points, std::span<const double> weights, const Vector& center,
                 double p) {
    const std::size_t dim = center.size();
    Proposal proposal;
    proposal.target.assign(dim, 0.0);
    double denom = 0.0;
    double coincident_weight = 0.0;
    Vector pull(dim, 0.0);  // sum over non-coincident points of w_i (x_i - c) / r_i
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (w == 0.0) continue;
        const double r = distance(points[i], center);
        if (r == 0.0) {
            coincident_weight += w;
            continue;
        }
        const double a = w * std::pow(r, p - 2.0);
        denom += a;
        for (std::size_t j = 0; j < dim; ++j) {
            proposal.target[j] += a * points[i][j];
            pull[j] += w * (points[i][j] - center[j]) / r;
        }
    }
    if (denom == 0.0) {
        proposal.target = center;
        proposal.optimal = true;
        return proposal;
    }
    for (double& t : proposal.target) t /= denom;

    if (p == 1.0 && coincident_weight > 0.0) {
        const double pull_norm = norm(pull);
        if (pull_norm <= coincident_weight) {
            proposal.target = center;
            proposal.optimal = true;
            return proposal;
        }
        const double keep = coincident_weight / pull_norm;
        for (std::size_t j = 0; j < dim; ++j)
            proposal.target[j] = (1.0 - keep) * proposal.target[j] + keep * center[j];
    }
    return proposal;
}

}  // namespace

CenterResult center_and_cost(std::span<const Vector> points, std::span<const double> weights, double p,
                             const CenterOptions& options) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (!weights.empty() && weights.size() != points.size())
        throw std::invalid_argument("weights must match points");

    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
        total += w;
    }
    if (points.empty() || total <= 0.0) {
        CenterResult empty;
        empty.center_defined = false;
        if (!points.empty()) empty.center.assign(points.front().size(), 0.0);
        return empty;
    }

    CenterResult result = weighted_mean(points, weights, total);
    if (p == 2.0) {
        result.cost = weighted_power_cost(points, weights, result.center, p);
        return result;
    }

    Vector center = result.center;
    double value = weighted_power_cost(points, weights, center, p);
    result.converged = false;
    int iter = 0;
    for (; iter < options.max_iters; ++iter) {
        const Proposal proposal = propose(points, weights, center, p);
        if (proposal.optimal) {
            result.converged = true;
            break;
        }
        double step = 1.0;
        Vector candidate;
        double candidate_value = 0.0;
        bool improved = false;
        while (step > 1e-12) {
            candidate = linear_combination(1.0 - step, center, step, proposal.target);
            candidate_value = weighted_power_cost(points, weights, candidate, p);
            if (candidate_value <= value) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // No descent left at double precision.
            result.converged = true;
            break;
        }
        const double moved = distance(candidate, center);
        center = std::move(candidate);
        value = candidate_value;
        if (moved < options.tol * (1.0 + norm(center))) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    // Iterates can approach a data point geometrically without landing on it.
    std::size_t nearest = 0;
    double nearest_r2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r2 = squared_distance(points[i], center);
        if (r2 < nearest_r2 && (weights.empty() || weights[i] > 0.0)) {
            nearest_r2 = r2;
            nearest = i;
        }
    }
    const double at_point = weighted_power_cost(points, weights, points[nearest], p);
    if (at_point <= value) {
        center = points[nearest];
        value = at_point;
    }

    result.center = std::move(center);
    result.cost = value;
    result.iterations = iter;
    return result;
}

double cluster_cost(std::span<const Vector> points, double p, const CenterOptions& options) {
    return center_and_cost(points, {}, p, options).cost;
}

double cost_of_clustering(const Dataset& data, const Clustering& clustering, double p,
                          const CenterOptions& options) {
    clustering.validate(data.size());
    double total = 0.0;
    std::vector<Vector> block;
    for (const auto& members : clustering.members()) {
        if (members.empty()) continue;
        block.clear();
        for (auto i : members) block.push_back(data.points[i]);
        total += cluster_cost(block, p, options);
    }
    return total;
}

double kmeans_pairwise_cost(std::span<const Vector> points) {
    if (points.empty()) throw std::invalid_argument("cluster must be nonempty");
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) sum += squared_distance(points[i], points[j]);
    return sum / static_cast<double>(points.size());
}

double weighted_pair_cost(std::span<const Vector> points, std::span<const double> lambda) {
    if (lambda.size() != points.size()) throw std::invalid_argument("lambda must match points");
    double mass = 0.0;
    for (double l : lambda) {
        if (l < 0.0) throw std::invalid_argument("lambda must be nonnegative");
        mass += l;
    }
    if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("lambda must sum to 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            sum += lambda[i] * lambda[j] * squared_distance(points[i], points[j]);
    return sum;
}

namespace {

std::vector<Vector> seed_centers(const Dataset& data, std::size_t k, double p, Rng& rng) {
    const std::size_t n = data.size();
    std::vector<Vector> centers;
    centers.push_back(data.points[rng.below(n)]);
    std::vector<double> weight(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, distance(data.points[i], c));
            weight[i] = std::pow(best, p);
            total += weight[i];
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= weight[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);
        }
        centers.push_back(data.points[pick]);
    }
    return centers;
}

ClusteringResult lloyd_once(const Dataset& data, std::size_t k, double p, std::uint64_t seed,
                            const CenterOptions& options) {
    Rng rng(seed);
    auto centers = seed_centers(data, k, p, rng);
    Clustering clustering;
    clustering.k = k;
    clustering.assignment.assign(data.size(), k);  // k = unassigned sentinel

    constexpr int kMaxRounds = 200;
    std::vector<Vector> block;
    for (int round = 0; round < kMaxRounds; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::size_t best = 0;
            double best_r2 = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double r2 = squared_distance(data.points[i], centers[c]);
                if (r2 < best_r2) {
                    best_r2 = r2;
                    best = c;
                }
            }
            if (clustering.assignment[i] != best) {
                clustering.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        const auto members = clustering.members();
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) continue;
            block.clear();
            for (auto i : members[c]) block.push_back(data.points[i]);
            centers[c] = center_and_cost(block, {}, p, options).center;
        }
    }
    return {clustering, cost_of_clustering(data, clustering, p, options)};
}

}  // namespace

ClusteringResult lloyd_heuristic(const Dataset& data, std::size_t k, double p, std::uint64_t seed,
                                 std::size_t restarts, const CenterOptions& options) {
    if (k == 0 || k > data.size()) throw std::invalid_argument("lloyd_heuristic requires 1 <= k <= n");
    if (restarts == 0) restarts = 1;
    ClusteringResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        auto candidate = lloyd_once(data, k, p, derive_seed(seed, r), options);
        if (candidate.cost < best.cost) best = std::move(candidate);
    }
    return best;
}

}  // namespace dimred
