#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dimred/clustering.hpp"

namespace dimred {

/// Largest n accepted by the exhaustive enumerators.
inline constexpr std::size_t kEnumerationGuard = 14;

/// Restricted growth strings a[0..n) with a[0] = 0, a[i] <= 1 + max(a[0..i)),
/// and every a[i] < k. Each set partition of {0..n-1} into at most k nonempty
/// blocks appears exactly once, in lexicographic (canonical) order.
class PartitionEnumerator {
public:
    PartitionEnumerator(std::size_t n, std::size_t k);
    /// Enumerates completions of a fixed valid prefix only.
    PartitionEnumerator(std::size_t n, std::size_t k, std::span<const std::size_t> prefix);

    std::span<const std::size_t> current() const noexcept { return rgs_; }
    /// Advances to the next string; false once the sequence is exhausted.
    bool next();

private:
    std::size_t n_;
    std::size_t k_;
    std::size_t frozen_;
    std::vector<std::size_t> rgs_;
    std::vector<std::size_t> prefix_max_;
};

std::uint64_t stirling2(std::size_t n, std::size_t k);
/// Number of partitions of n elements into at most k blocks.
std::uint64_t count_partitions(std::size_t n, std::size_t k);

/// Calls visit(rgs) for every partition in canonical order. Throws
/// std::invalid_argument when n exceeds kEnumerationGuard.
void enumerate_partitions(std::size_t n, std::size_t k,
                          const std::function<void(std::span<const std::size_t>)>& visit);

/// Optimal cost of every nonempty subset, indexed by bitmask (2^n entries,
/// entry 0 is 0).
std::vector<double> subset_cost_table(std::span<const Vector> points, double p,
                                      const CenterOptions& options = {}, unsigned workers = 1);

/// Cost of the partition encoded by `rgs`, summing table entries block by block.
double partition_cost(std::span<const std::size_t> rgs, std::span<const double> table, std::size_t k);

/// Exhaustive minimum over all partitions into at most k blocks. Ties go to
/// the first partition in canonical order, whatever the worker count.
ClusteringResult optimal_clustering_bruteforce(const Dataset& data, std::size_t k, double p,
                                               const CenterOptions& options = {}, unsigned workers = 1);

/// Exact optimum with closed forms where enumeration is unnecessary: k >= n
/// gives singletons at cost 0, and k = n - 1 merges the cheapest pair (every
/// clustering with n - 1 blocks contains a block of two or more points, and a
/// block never costs less than any of its subsets). Otherwise enumerates.
ClusteringResult optimal_clustering_exact(const Dataset& data, std::size_t k, double p,
                                          const CenterOptions& options = {}, unsigned workers = 1);

}  // namespace dimred
