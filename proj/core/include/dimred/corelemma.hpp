#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dimred/clustering.hpp"
#include "dimred/projection.hpp"

namespace dimred {

/// Sorted, duplicate-free element indices into a ground set {0, ..., n-1}.
using Subset = std::vector<std::size_t>;

/// Random subset of the ground set given by an explicit finite support.
struct SubsetDistribution {
    struct Atom {
        Subset subset;
        double prob = 0.0;
    };
    std::size_t ground_size = 0;
    std::vector<Atom> support;

    /// Checks subsets are sorted and in range, probabilities are nonnegative
    /// and sum to 1 within 1e-12, and the support is nonempty.
    void validate() const;
    /// Pr(x in C) for every element.
    std::vector<double> marginals() const;
    double prob_nonempty() const;
};

/// Random partial clustering: k disjoint (possibly empty) clusters per atom.
struct PartialClusteringDistribution {
    struct Atom {
        std::vector<Subset> clusters;
        double prob = 0.0;
    };
    std::size_t ground_size = 0;
    std::size_t k = 1;
    std::vector<Atom> support;

    void validate() const;
    /// Distribution of the i-th cluster alone.
    SubsetDistribution cluster(std::size_t i) const;
};

enum class MeasureKind { lemma, padded, clustering };

/// Deterministic measure mu on the ground set and the rule C -> R, stored per
/// support atom.
struct MeasureResult {
    std::vector<double> mu;
    std::vector<Subset> R_of;
    double theta = 0.0;
    MeasureKind kind = MeasureKind::lemma;
    std::size_t k = 1;

    double total() const;
};

/// Raised by build_measure when some Pr(x in C) < 2 theta.
class HypothesisViolation : public std::invalid_argument {
public:
    HypothesisViolation(std::size_t element, double marginal, double theta);
    std::size_t element;
    double marginal;
};

/// Recursive construction: l = theta |X|, X' = {x : Pr(x in C, |C| < l) >= 2 theta},
/// recursion on (X', C' = C cap X' for small C), mu = mu' + 1/l on X', 1/l
/// elsewhere, and R = R' plus C \ X' for small C. |C| < l is decided exactly.
MeasureResult build_measure(const SubsetDistribution& dist, double theta);

/// Runs the construction on {x : Pr(x in C) >= 2 theta} only and puts the
/// remaining elements of C into R. No hypothesis on marginals.
MeasureResult build_measure_padded(const SubsetDistribution& dist, double theta);

/// Padded construction per cluster at theta / (2k); mu and R are summed and
/// unioned over clusters.
MeasureResult build_measure_clustering(const PartialClusteringDistribution& dist, double theta);

struct MeasureWitness {
    std::size_t atom = 0;
    std::size_t element = 0;
    double value = 0.0;
    double required = 0.0;
};

struct MeasureReport {
    bool subset_ok = true;      // R subset of C in every atom
    bool condition1 = true;     // mu(x) >= 1/|C \ R| on C \ R
    bool condition2 = true;     // Pr(x in R) <= condition2_bound
    bool condition3 = true;     // mu(X) <= condition3_bound
    double max_marginal_R = 0.0;
    double condition2_bound = 0.0;
    /// MeasureKind::lemma only: whether the sharper theta bound also held.
    std::optional<bool> condition2_header;
    double mu_total = 0.0;
    double condition3_bound = 0.0;
    std::optional<MeasureWitness> witness;

    bool passed() const { return subset_ok && condition1 && condition2 && condition3; }
};

/// Exhaustive check over the support. Bounds follow the construction kind:
/// lemma and padded use 2 theta and Pr(C nonempty)/theta^2, clustering uses
/// theta and 4 k^3 / theta^2 with condition 1 checked per cluster.
MeasureReport verify_measure(const SubsetDistribution& dist, const MeasureResult& result);
MeasureReport verify_measure(const PartialClusteringDistribution& dist, const MeasureResult& result);

/// |S| <= mu(S) |C'| for every S subset of C' = C \ R, where each cluster
/// is checked separately. Clusters with more than 20 elements are rejected.
bool check_observation(std::span<const Subset> clusters, const Subset& R, std::span<const double> mu);

/// Symmetric relation on {0, ..., n-1} without self pairs.
class PairRelation {
public:
    explicit PairRelation(std::size_t n = 0);
    std::size_t size() const noexcept { return n_; }
    void insert(std::size_t a, std::size_t b);
    bool contains(std::size_t a, std::size_t b) const;
    std::size_t pair_count() const;

private:
    std::size_t n_;
    std::vector<unsigned char> bits_;
};

struct PruneResult {
    Subset core;
    Subset bad;
    double alpha = 0.0;
    double mu_pair_mass = 0.0;  // sum over ordered pairs in D of mu(x) mu(y)
    bool emptied = false;       // mu_pair_mass >= alpha^2
};

/// Bad-point pruning with alpha = theta/(1+theta). mu and R should come from
/// build_measure_clustering at theta/3 on a distribution containing the
/// realized clustering.
PruneResult prune(std::size_t n, std::span<const Subset> clusters, const PairRelation& distorted,
                  std::span<const double> mu, const Subset& R, double theta);

/// Fraction of y in cluster(x) cap core with (x, y) preserved; 1 for x alone.
double preserved_fraction(std::size_t x, std::span<const Subset> clusters, const Subset& core,
                          const PairRelation& distorted);

struct CoreTrial {
    Subset core;
    std::size_t preserved_center_points = 0;  // |Y|
    bool emptied = false;
    double min_preserved_fraction = 1.0;      // over core points
    bool centers_preserved = true;            // every core point keeps all center distances
};

struct CoreVerdict {
    double eps = 0.0;
    double theta = 0.0;
    std::vector<CoreTrial> trials;
    std::vector<double> excluded_rate;       // empirical Pr(x not in core)
    std::vector<double> excluded_std_error;
    bool within_cluster_ok = true;           // every trial, every core point >= 1 - theta
    bool centers_ok = true;
    bool marginal_ok = true;                 // excluded_rate <= theta + 3 sigma for every x
    double max_excluded_rate = 0.0;

    bool passed() const { return within_cluster_ok && centers_ok && marginal_ok; }
};

/// One trial per map. Y is the set of points whose distances to all centers
/// are preserved; the empirical distribution of the partial clusterings
/// cluster_i cap Y (uniform over trials) feeds the measure at theta/3, then
/// every trial is pruned with its own distorted pairs.
CoreVerdict verify_core(const Dataset& data, const Clustering& clustering, std::span<const Vector> centers,
                        std::span<const ProjectionMap> maps, double eps, double theta, unsigned workers = 1);

std::string to_json(const SubsetDistribution& dist);
SubsetDistribution subset_distribution_from_json(std::string_view text);
std::string to_json(const PartialClusteringDistribution& dist);
PartialClusteringDistribution partial_clustering_from_json(std::string_view text);
std::string to_json(const MeasureResult& result);
std::string to_json(const MeasureReport& report);
std::string to_json(const CoreVerdict& verdict);

}  // namespace dimred
