#pragma once

#include <cstddef>
#include <cstdint>

#include "dimred/clustering.hpp"
#include "dimred/corelemma.hpp"
#include "dimred/extension.hpp"

namespace dimred {

enum class PairOffset {
    shared,      // every pair is {b_i, b_i + e_1}
    orthogonal,  // pair i is offset along its own axis
};

/// t pairs at distance 1 with base points gap * e_j on distinct axes, so
/// cross-pair distances are at least gap * sqrt(2). Needs m >= t + 1 for
/// shared offsets and m >= 2t for orthogonal ones. Labels give the pair index.
/// The construction is deterministic; `seed` is recorded only.
Dataset gen_lower_bound_instance(std::size_t t, double gap, std::size_t m, std::uint64_t seed,
                                 PairOffset offset = PairOffset::shared);

/// k Gaussian blobs of per_cluster points with standard deviation `spread`.
/// Blob i is centered at separation * (1 + i / m) * e_(i mod m), so centers
/// are pairwise at least `separation` apart. Labels hold the blob index.
Dataset gen_blobs(std::size_t k, std::size_t per_cluster, std::size_t m, double spread, double separation,
                  std::uint64_t seed);

/// Random subsets of {0..n-1} (each element kept with a per-atom rate drawn
/// from [0.2, 0.9]) with random positive probabilities.
SubsetDistribution random_subset_distribution(std::size_t n, std::size_t support, std::uint64_t seed);

/// Each atom assigns every element to one of k clusters or leaves it out.
PartialClusteringDistribution random_partial_clustering(std::size_t n, std::size_t k, std::size_t support,
                                                        std::uint64_t seed);

/// Keeps the elements with Pr(x in C) >= threshold and relabels them 0..n'-1.
SubsetDistribution restrict_to_frequent(const SubsetDistribution& dist, double threshold);

/// n standard normal points in R^dim mapped by contraction * Q for a random
/// rotation Q, then `planted` images pushed away from the image centroid.
/// The push is halved until the expansion graph is theta everywhere-sparse.
/// u is an independent standard normal point; instance.theta is set to theta.
ExtensionInstance gen_sparse_expansion_instance(std::size_t n, std::size_t dim, double theta, double eps,
                                                double contraction, std::size_t planted, std::uint64_t seed);

}  // namespace dimred
