#include "dimred/partitions.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dimred/parallel.hpp"

namespace dimred {

namespace {

void check_guard(std::size_t n) {
    if (n > kEnumerationGuard)
        throw std::invalid_argument("partition enumeration is limited to n <= " +
                                    std::to_string(kEnumerationGuard));
}

Clustering from_rgs(std::span<const std::size_t> rgs, std::size_t k) {
    Clustering c;
    c.k = k;
    c.assignment.assign(rgs.begin(), rgs.end());
    return c;
}

// Valid RGS prefixes of a given length, in canonical order.
std::vector<std::vector<std::size_t>> prefixes(std::size_t length, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> grow = [&](std::size_t bound) {
        if (cur.size() == length) {
            out.push_back(cur);
            return;
        }
        const std::size_t limit = std::min(bound + 1, k - 1);
        for (std::size_t v = 0; v <= limit; ++v) {
            cur.push_back(v);
            grow(std::max(bound, v));
            cur.pop_back();
        }
    };
    cur.push_back(0);
    grow(0);
    return out;
}

}  // namespace

PartitionEnumerator::PartitionEnumerator(std::size_t n, std::size_t k)
    : PartitionEnumerator(n, k, std::span<const std::size_t>{}) {}

PartitionEnumerator::PartitionEnumerator(std::size_t n, std::size_t k, std::span<const std::size_t> prefix)
    : n_(n), k_(k), frozen_(std::max<std::size_t>(prefix.size(), 1)), rgs_(n, 0), prefix_max_(n, 0) {
    if (n == 0) throw std::invalid_argument("partition enumeration needs n >= 1");
    if (k == 0) throw std::invalid_argument("partition enumeration needs k >= 1");
    if (prefix.size() > n) throw std::invalid_argument("prefix longer than n");
    std::size_t running = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const std::size_t bound = i == 0 ? 0 : running + 1;
        if (prefix[i] > bound || prefix[i] >= k) throw std::invalid_argument("prefix is not a valid RGS");
        rgs_[i] = prefix[i];
        running = std::max(running, prefix[i]);
        prefix_max_[i] = running;
    }
    for (std::size_t i = prefix.size(); i < n; ++i) prefix_max_[i] = running;
}

bool PartitionEnumerator::next() {
    for (std::size_t i = n_; i-- > frozen_;) {
        const std::size_t bound = prefix_max_[i - 1] + 1;
        if (rgs_[i] < bound && rgs_[i] + 1 < k_) {
            ++rgs_[i];
            prefix_max_[i] = std::max(prefix_max_[i - 1], rgs_[i]);
            for (std::size_t j = i + 1; j < n_; ++j) {
                rgs_[j] = 0;
                prefix_max_[j] = prefix_max_[i];
            }
            return true;
        }
    }
    return false;
}

std::uint64_t stirling2(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::vector<std::vector<std::uint64_t>> s(n + 1, std::vector<std::uint64_t>(k + 1, 0));
    s[0][0] = 1;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= std::min(i, k); ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
    return s[n][k];
}

std::uint64_t count_partitions(std::size_t n, std::size_t k) {
    std::uint64_t total = 0;
    for (std::size_t j = 1; j <= std::min(n, k); ++j) total += stirling2(n, j);
    return total;
}

void enumerate_partitions(std::size_t n, std::size_t k,
                          const std::function<void(std::span<const std::size_t>)>& visit) {
    check_guard(n);
    PartitionEnumerator it(n, k);
    do {
        visit(it.current());
    } while (it.next());
}

std::vector<double> subset_cost_table(std::span<const Vector> points, double p, const CenterOptions& options,
                                      unsigned workers) {
    const std::size_t n = points.size();
    check_guard(n);
    const std::size_t masks = std::size_t{1} << n;
    std::vector<double> table(masks, 0.0);
    parallel_for(masks - 1, workers, [&](std::size_t idx) {
        const std::size_t mask = idx + 1;
        std::vector<Vector> block;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) block.push_back(points[i]);
        table[mask] = block.size() == 1 ? 0.0 : cluster_cost(block, p, options);
    });
    return table;
}

double partition_cost(std::span<const std::size_t> rgs, std::span<const double> table, std::size_t k) {
    std::size_t masks[64] = {};
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < rgs.size(); ++i) {
        masks[rgs[i]] |= std::size_t{1} << i;
        blocks = std::max(blocks, rgs[i] + 1);
    }
    (void)k;
    double total = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) total += table[masks[b]];
    return total;
}

ClusteringResult optimal_clustering_bruteforce(const Dataset& data, std::size_t k, double p,
                                               const CenterOptions& options, unsigned workers) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("dataset is empty");
    if (k == 0) throw std::invalid_argument("k must be positive");
    check_guard(n);
    const auto table = subset_cost_table(data.points, p, options, workers);

    // Shard by RGS prefix; shards are visited in canonical order at merge time.
    const std::size_t prefix_len = std::min<std::size_t>(n, 4);
    const auto shards = prefixes(prefix_len, k);
    struct Best {
        std::vector<std::size_t> rgs;
        double cost = std::numeric_limits<double>::infinity();
    };
    std::vector<Best> best(shards.size());
    parallel_for(shards.size(), workers, [&](std::size_t s) {
        PartitionEnumerator it(n, k, shards[s]);
        do {
            const double c = partition_cost(it.current(), table, k);
            if (c < best[s].cost) {
                best[s].cost = c;
                best[s].rgs.assign(it.current().begin(), it.current().end());
            }
        } while (it.next());
    });
    std::size_t winner = 0;
    for (std::size_t s = 1; s < best.size(); ++s)
        if (best[s].cost < best[winner].cost) winner = s;
    return {from_rgs(best[winner].rgs, k), best[winner].cost};
}

ClusteringResult optimal_clustering_exact(const Dataset& data, std::size_t k, double p,
                                          const CenterOptions& options, unsigned workers) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("dataset is empty");
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (k >= n) {
        Clustering c;
        c.k = k;
        c.assignment.resize(n);
        for (std::size_t i = 0; i < n; ++i) c.assignment[i] = i;
        return {c, 0.0};
    }
    if (k + 1 == n) {
        // Canonical order of single-merge partitions: by the later index j, then i.
        std::size_t best_i = 0, best_j = 1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                const Vector pair[2] = {data.points[i], data.points[j]};
                const double c = cluster_cost(pair, p, options);
                if (c < best_cost) {
                    best_cost = c;
                    best_i = i;
                    best_j = j;
                }
            }
        Clustering c;
        c.k = k;
        c.assignment.resize(n);
        for (std::size_t t = 0; t < n; ++t) c.assignment[t] = t < best_j ? t : t - 1;
        c.assignment[best_j] = best_i;
        return {c, best_cost};
    }
    return optimal_clustering_bruteforce(data, k, p, options, workers);
}

}  // namespace dimred
