#include "dod/oracle.hpp"

#include <chrono>

#include "dod/rng.hpp"

namespace dod {

OracleReport brute_force_outliers(const Dataset& ds, double r, std::uint32_t k,
                                  bool capped_at_k) {
    const std::size_t n = ds.size();
    OracleReport report;
    report.neighbor_counts.assign(n, 0);
    const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n); ++p) {
        std::uint64_t count = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if (static_cast<std::size_t>(p) == q) continue;
            if (ds.distance(static_cast<ObjectId>(p), static_cast<ObjectId>(q)) <= r) {
                ++count;
                if (capped_at_k && count >= k) break;
            }
        }
        report.neighbor_counts[p] = count;
    }
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t p = 0; p < n; ++p)
        if (report.neighbor_counts[p] < k) report.outliers.push_back(static_cast<ObjectId>(p));
    return report;
}

bool monotone_reachability(const Adjacency& adj, const Dataset& ds, ObjectId p, ObjectId q) {
    if (adj.size() != ds.size()) throw ConfigError("adjacency does not match the dataset");
    if (p == q) return true;
    const std::size_t n = adj.size();
    std::vector<double> dist_p(n);
    for (std::size_t x = 0; x < n; ++x)
        dist_p[x] = static_cast<ObjectId>(x) == p ? 0.0 : ds.distance(p, static_cast<ObjectId>(x));
    std::vector<char> visited(n, 0);
    std::vector<ObjectId> queue{p};
    visited[p] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const ObjectId v = queue[head];
        for (ObjectId w : adj[v]) {
            if (visited[w] || dist_p[v] > dist_p[w]) continue;
            if (w == q) return true;
            visited[w] = 1;
            queue.push_back(w);
        }
    }
    return false;
}

double monotone_path_density(const Adjacency& adj, const Dataset& ds, double r,
                             std::size_t samples, std::uint64_t seed) {
    if (adj.size() != ds.size()) throw ConfigError("adjacency does not match the dataset");
    const std::size_t n = adj.size();
    if (n < 2 || samples == 0) return 1.0;
    Rng rng(derive_seed(seed, 0x64656e73ULL));
    std::size_t hits = 0, tried = 0;
    for (std::size_t attempts = 50 * samples; attempts > 0 && tried < samples; --attempts) {
        const auto p = static_cast<ObjectId>(uniform_index(rng, n));
        const auto q = static_cast<ObjectId>(uniform_index(rng, n));
        if (p == q || ds.distance(p, q) > r) continue;
        ++tried;
        if (monotone_reachability(adj, ds, p, q)) ++hits;
    }
    if (tried == 0) return 1.0;
    return static_cast<double>(hits) / static_cast<double>(tried);
}

}  // namespace dod
