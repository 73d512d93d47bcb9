#include "dod/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "dod/nndescent.hpp"
#include "dod/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dod {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::uint32_t greedy_counting(const Mrpg& g, const Dataset& ds, ObjectId p, double r,
                              std::uint32_t k, GreedyScratch& scratch,
                              std::uint64_t* distance_evals, std::uint64_t* vertices_visited) {
    if (k == 0) return 0;
    scratch.marker.reset();
    scratch.queue.clear();
    scratch.marker.test_and_set(p);
    scratch.queue.push_back(p);
    std::uint32_t count = 0;
    for (std::size_t head = 0; head < scratch.queue.size(); ++head) {
        const ObjectId v = scratch.queue[head];
        for (ObjectId w : g.adj[v]) {
            if (scratch.marker.test_and_set(w)) continue;
            if (distance_evals) ++*distance_evals;
            if (vertices_visited) ++*vertices_visited;
            if (ds.distance(p, w) <= r) {
                if (++count >= k) return count;
                scratch.queue.push_back(w);
            } else if (g.is_pivot[w]) {
                scratch.queue.push_back(w);  // pivots pass through regardless of range
            }
        }
    }
    return count;
}

std::uint32_t greedy_counting(const Mrpg& g, const Dataset& ds, ObjectId p, double r,
                              std::uint32_t k) {
    GreedyScratch scratch(g.size());
    return greedy_counting(g, ds, p, r, k, scratch);
}

std::uint32_t exact_counting(const Dataset& ds, const VpTree* tree, ObjectId p, double r,
                             std::uint32_t k, CountMode mode, DistanceCounter* distance_evals) {
    if (mode == CountMode::VpTree) {
        if (!tree) throw ConfigError("vp-tree verification requested but no tree was built");
        return tree->range_count(p, r, k, distance_evals);
    }
    std::uint32_t count = 0;
    const std::size_t n = ds.size();
    for (std::size_t q = 0; q < n; ++q) {
        if (static_cast<ObjectId>(q) == p) continue;
        const double d = distance_evals
                             ? ds.distance_counted(p, static_cast<ObjectId>(q), *distance_evals)
                             : ds.distance(p, static_cast<ObjectId>(q));
        if (d <= r && ++count >= k) return count;
    }
    return count;
}

double estimate_intrinsic_dim(const Dataset& ds, std::uint64_t seed) {
    const std::size_t n = ds.size();
    if (n < 3) return 1.0;
    const auto k_nn = static_cast<std::uint32_t>(std::min<std::size_t>(10, n - 1));
    const std::size_t samples = std::min<std::size_t>(100, n);
    Rng rng(derive_seed(seed, 0x6469606dULL));
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto p = static_cast<ObjectId>(uniform_index(rng, n));
        const NeighborList nn = exact_knn(ds, p, k_nn);
        const double tk = nn.entries.back().dist;
        if (tk <= 0.0) continue;  // duplicate-saturated sample tells us nothing
        double log_sum = 0.0;
        std::size_t terms = 0;
        for (std::size_t j = 0; j + 1 < nn.entries.size(); ++j) {
            const double tj = nn.entries[j].dist;
            if (tj <= 0.0) continue;
            log_sum += std::log(tk / tj);
            ++terms;
        }
        if (terms == 0 || log_sum <= 0.0) continue;
        acc += static_cast<double>(terms) / log_sum;
        ++used;
    }
    return used ? acc / used : 1.0;
}

namespace {

DodResult run_detect(const Dataset& ds, const Mrpg& g, const VpTree* tree,
                     const DodParams& params, std::uint32_t threads) {
    const std::size_t n = ds.size();
    if (g.size() != n) throw MismatchError("graph vertex count does not match the dataset");
    if (params.k == 0) throw ConfigError("k must be at least 1");
    if (std::isnan(params.r) || params.r < 0.0) throw ConfigError("r must be nonnegative");
    if (threads == 0) throw ConfigError("threads must be at least 1");

    CountMode mode = CountMode::LinearScan;
    if (params.verify_mode == VerifyMode::VpTree) {
        if (!tree) throw ConfigError("vp-tree verification requested but no tree was built");
        mode = CountMode::VpTree;
    } else if (params.verify_mode == VerifyMode::Auto) {
        if (tree && estimate_intrinsic_dim(ds, params.seed) < 5.0) mode = CountMode::VpTree;
    }

    std::vector<ObjectId> perm(n);
    std::iota(perm.begin(), perm.end(), ObjectId{0});
    Rng rng(derive_seed(params.seed, 0x7065726dULL));
    std::shuffle(perm.begin(), perm.end(), rng);

    const std::size_t chunks = threads;
    std::vector<std::vector<ObjectId>> chunk_candidates(chunks), chunk_shortcut(chunks);
    std::vector<std::uint64_t> chunk_evals(chunks, 0), chunk_visited(chunks, 0),
        chunk_runs(chunks, 0);

    const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel num_threads(static_cast<int>(threads))
    {
        GreedyScratch scratch(n);
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
            const std::size_t lo = static_cast<std::size_t>(c) * n / chunks;
            const std::size_t hi = (static_cast<std::size_t>(c) + 1) * n / chunks;
            for (std::size_t i = lo; i < hi; ++i) {
                const ObjectId p = perm[i];
                const NeighborList* list = g.has_exact[p] && params.k <= g.K_prime
                                               ? g.exact_list_of(p)
                                               : nullptr;
                if (list) {
                    // Stored exact K'-NN distances decide p outright: if fewer
                    // than k of the K' nearest are within r, nothing else can
                    // be either.
                    std::uint32_t cnt = 0;
                    for (const Neighbor& nb : list->entries) {
                        if (nb.dist > params.r) break;
                        if (++cnt >= params.k) break;
                    }
                    if (cnt < params.k) chunk_shortcut[c].push_back(p);
                } else {
                    const std::uint32_t cnt =
                        greedy_counting(g, ds, p, params.r, params.k, scratch, &chunk_evals[c],
                                        &chunk_visited[c]);
                    ++chunk_runs[c];
                    if (cnt < params.k) chunk_candidates[c].push_back(p);
                }
            }
        }
    }

    DodResult result;
    std::vector<ObjectId> verify_list;
    for (std::size_t c = 0; c < chunks; ++c) {
        verify_list.insert(verify_list.end(), chunk_candidates[c].begin(),
                           chunk_candidates[c].end());
        result.shortcut_outliers.insert(result.shortcut_outliers.end(),
                                        chunk_shortcut[c].begin(), chunk_shortcut[c].end());
    }
    result.filter_seconds = seconds_since(t0);

    const std::size_t m = verify_list.size();
    std::vector<std::vector<ObjectId>> chunk_outliers(chunks);
    std::vector<std::uint64_t> chunk_vevals(chunks, 0);
    const auto t1 = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(threads))
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * m / chunks;
        const std::size_t hi = (static_cast<std::size_t>(c) + 1) * m / chunks;
        DistanceCounter counter;
        for (std::size_t i = lo; i < hi; ++i) {
            const ObjectId p = verify_list[i];
            if (exact_counting(ds, tree, p, params.r, params.k, mode, &counter) < params.k)
                chunk_outliers[c].push_back(p);
        }
        chunk_vevals[c] = counter.count;
    }
    result.verify_seconds = seconds_since(t1);

    result.outliers = result.shortcut_outliers;
    for (std::size_t c = 0; c < chunks; ++c)
        result.outliers.insert(result.outliers.end(), chunk_outliers[c].begin(),
                               chunk_outliers[c].end());
    std::sort(result.outliers.begin(), result.outliers.end());
    std::sort(result.shortcut_outliers.begin(), result.shortcut_outliers.end());

    result.candidates = verify_list;
    result.candidates.insert(result.candidates.end(), result.shortcut_outliers.begin(),
                             result.shortcut_outliers.end());
    std::sort(result.candidates.begin(), result.candidates.end());
    result.candidate_count = result.candidates.size();
    result.shortcut_count = result.shortcut_outliers.size();
    result.verified_count = m;

    std::uint64_t evals = 0, visited = 0, runs = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        evals += chunk_evals[c] + chunk_vevals[c];
        visited += chunk_visited[c];
        runs += chunk_runs[c];
    }
    result.distance_evals = evals;
    result.rho = runs ? static_cast<double>(visited) / static_cast<double>(runs) : 0.0;
    return result;
}

}  // namespace

DodResult detect(const Dataset& ds, const Mrpg& g, const VpTree* tree, const DodParams& params) {
    return run_detect(ds, g, tree, params, 1);
}

DodResult detect_partitioned(const Dataset& ds, const Mrpg& g, const VpTree* tree,
                             const DodParams& params) {
    return run_detect(ds, g, tree, params, params.threads);
}

}  // namespace dod
