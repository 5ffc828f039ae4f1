#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dimred/linalg.hpp"

namespace dimred {

/// Finite point multiset in R^dim. `labels` optionally carries a generator's
/// ground-truth assignment.
struct Dataset {
    std::size_t dim = 0;
    std::vector<Vector> points;
    std::vector<std::string> ids;
    std::vector<std::size_t> labels;

    static Dataset from_points(std::vector<Vector> points);

    std::size_t size() const noexcept { return points.size(); }
    /// Throws std::invalid_argument if points disagree on dimension or ids/labels
    /// have the wrong length.
    void validate() const;
};

/// Assignment of every point to a cluster index in [0, k). Empty clusters are
/// legal ("at most k" semantics) and cost nothing.
struct Clustering {
    std::vector<std::size_t> assignment;
    std::size_t k = 1;

    void validate(std::size_t n) const;
    std::vector<std::vector<std::size_t>> members() const;
    std::size_t empty_clusters() const;
};

struct CenterResult {
    Vector center;
    double cost = 0.0;
    int iterations = 0;
    bool converged = true;
    bool center_defined = true;  // false for an empty or zero-weight cluster
};

struct CenterOptions {
    double tol = 1e-10;
    int max_iters = 10000;
};

/// Minimizes sum_i w_i ||x_i - c||^p over c. p = 2 is the weighted mean;
/// p = 1 runs Weiszfeld with the Vardi-Zhang fix at data points; other p run a
/// reweighted fixed point (a scaled gradient step) with step halving.
/// An empty `weights` span means unit weights.
CenterResult center_and_cost(std::span<const Vector> points, std::span<const double> weights, double p,
                             const CenterOptions& options = {});

/// sum_i w_i ||x_i - c||^p
double weighted_power_cost(std::span<const Vector> points, std::span<const double> weights,
                           std::span<const double> center, double p);

/// Optimal l_p cost of one cluster with unit weights.
double cluster_cost(std::span<const Vector> points, double p, const CenterOptions& options = {});

/// Sum of per-cluster optimal costs.
double cost_of_clustering(const Dataset& data, const Clustering& clustering, double p,
                          const CenterOptions& options = {});

/// (1/|C|) * sum over unordered pairs ||x' - x''||^2, the k-means cost of C.
double kmeans_pairwise_cost(std::span<const Vector> points);

/// sum over unordered pairs lambda' lambda'' ||x' - x''||^2 for lambda on the
/// simplex; equals min_u sum lambda_x ||u - x||^2.
double weighted_pair_cost(std::span<const Vector> points, std::span<const double> lambda);

struct ClusteringResult {
    Clustering clustering;
    double cost = 0.0;
};

/// k-means++-style seeding (D^p sampling) followed by alternating
/// assignment / center steps until no point moves; best of `restarts`.
/// Restart r uses derive_seed(seed, r), so more restarts never do worse.
ClusteringResult lloyd_heuristic(const Dataset& data, std::size_t k, double p, std::uint64_t seed,
                                 std::size_t restarts = 1, const CenterOptions& options = {});

}  // namespace dimred
