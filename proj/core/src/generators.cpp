#include "dimred/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dimred/projection.hpp"
#include "dimred/random.hpp"

namespace dimred {

Dataset gen_lower_bound_instance(std::size_t t, double gap, std::size_t m, std::uint64_t seed, PairOffset offset) {
    (void)seed;
    if (t == 0) throw std::invalid_argument("need at least one pair");
    if (!(gap > 1.0)) throw std::invalid_argument("gap must exceed the pair distance 1");
    const std::size_t need = offset == PairOffset::shared ? t + 1 : 2 * t;
    if (m < need)
        throw std::invalid_argument("m = " + std::to_string(m) + " is too small to separate " + std::to_string(t) +
                                    " pairs (need " + std::to_string(need) + ")");
    Dataset data;
    data.dim = m;
    for (std::size_t i = 0; i < t; ++i) {
        Vector base(m, 0.0);
        const std::size_t axis = offset == PairOffset::shared ? i + 1 : t + i;
        base[axis] = gap;
        Vector partner = base;
        partner[offset == PairOffset::shared ? 0 : i] += 1.0;
        data.points.push_back(std::move(base));
        data.points.push_back(std::move(partner));
        data.labels.push_back(i);
        data.labels.push_back(i);
    }
    return data;
}

Dataset gen_blobs(std::size_t k, std::size_t per_cluster, std::size_t m, double spread, double separation,
                  std::uint64_t seed) {
    if (k == 0 || per_cluster == 0 || m == 0) throw std::invalid_argument("blobs need k, per_cluster, m >= 1");
    if (spread < 0.0) throw std::invalid_argument("spread must be nonnegative");
    Rng rng(seed);
    Dataset data;
    data.dim = m;
    for (std::size_t i = 0; i < k; ++i) {
        Vector center(m, 0.0);
        center[i % m] = separation * (1.0 + static_cast<double>(i / m));
        for (std::size_t j = 0; j < per_cluster; ++j) {
            Vector x = center;
            for (auto& c : x) c += spread * rng.normal();
            data.points.push_back(std::move(x));
            data.labels.push_back(i);
        }
    }
    return data;
}

namespace {

std::vector<double> random_probabilities(std::size_t count, Rng& rng) {
    std::vector<double> w(count);
    double total = 0.0;
    for (auto& x : w) total += (x = rng.uniform(0.05, 1.0));
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace

SubsetDistribution random_subset_distribution(std::size_t n, std::size_t support, std::uint64_t seed) {
    if (support == 0) throw std::invalid_argument("support must be nonempty");
    Rng rng(seed);
    SubsetDistribution d;
    d.ground_size = n;
    const auto probs = random_probabilities(support, rng);
    for (std::size_t j = 0; j < support; ++j) {
        const double rate = rng.uniform(0.2, 0.9);
        Subset s;
        for (std::size_t x = 0; x < n; ++x)
            if (rng.uniform() < rate) s.push_back(x);
        d.support.push_back({std::move(s), probs[j]});
    }
    return d;
}

PartialClusteringDistribution random_partial_clustering(std::size_t n, std::size_t k, std::size_t support,
                                                        std::uint64_t seed) {
    if (support == 0 || k == 0) throw std::invalid_argument("support and k must be positive");
    Rng rng(seed);
    PartialClusteringDistribution d;
    d.ground_size = n;
    d.k = k;
    const auto probs = random_probabilities(support, rng);
    for (std::size_t j = 0; j < support; ++j) {
        std::vector<Subset> clusters(k);
        for (std::size_t x = 0; x < n; ++x) {
            const std::size_t c = rng.below(k + 1);
            if (c < k) clusters[c].push_back(x);
        }
        d.support.push_back({std::move(clusters), probs[j]});
    }
    return d;
}

SubsetDistribution restrict_to_frequent(const SubsetDistribution& dist, double threshold) {
    const auto marginal = dist.marginals();
    std::vector<std::size_t> relabel(dist.ground_size, dist.ground_size);
    std::size_t next = 0;
    for (std::size_t x = 0; x < dist.ground_size; ++x)
        if (marginal[x] >= threshold) relabel[x] = next++;
    SubsetDistribution out;
    out.ground_size = next;
    for (const auto& a : dist.support) {
        Subset s;
        for (auto x : a.subset)
            if (relabel[x] < dist.ground_size) s.push_back(relabel[x]);
        out.support.push_back({std::move(s), a.prob});
    }
    return out;
}

ExtensionInstance gen_sparse_expansion_instance(std::size_t n, std::size_t dim, double theta, double eps,
                                                double contraction, std::size_t planted, std::uint64_t seed) {
    if (n == 0 || dim == 0) throw std::invalid_argument("need n, dim >= 1");
    if (planted > n) throw std::invalid_argument("cannot plant more points than n");
    Rng rng(seed);
    ExtensionInstance in;
    in.eps = eps;
    in.theta = theta;
    in.X.resize(n, Vector(dim));
    for (auto& x : in.X)
        for (auto& c : x) c = rng.normal();
    in.u.resize(dim);
    for (auto& c : in.u) c = rng.normal();

    const auto rotation = sample_subspace(dim, dim, derive_seed(seed, 1));
    std::vector<Vector> base = rotation.apply_all(in.X);
    for (auto& y : base)
        for (auto& c : y) c *= contraction;

    Vector centroid(dim, 0.0);
    for (const auto& y : base)
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += y[j] / static_cast<double>(n);
    double spread = 0.0;
    for (const auto& y : base) spread = std::max(spread, distance(y, centroid));

    // Planted indices: the first `planted` of a random permutation.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    order.resize(planted);

    double push = 2.0 * spread;
    for (int attempt = 0; attempt < 64; ++attempt, push *= 0.5) {
        in.phiX = base;
        for (auto i : order) {
            auto dir = subtract(base[i], centroid);
            const double len = norm(dir);
            if (len == 0.0) continue;
            for (std::size_t j = 0; j < dim; ++j) in.phiX[i][j] += push * dir[j] / len;
        }
        if (everywhere_sparse(build_expansion_graph(in.X, in.phiX), theta)) return in;
    }
    in.phiX = base;
    return in;
}

}  // namespace dimred
