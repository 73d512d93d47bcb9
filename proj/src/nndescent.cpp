#include "dod/nndescent.hpp"

#include <numeric>
#include <utility>

#include "dod/rng.hpp"
#include "dod/vptree.hpp"

namespace dod {

bool NeighborList::insert(Neighbor nb) {
    if (capacity == 0) return false;
    if (full() && !(nb < entries.back())) return false;
    const auto pos = std::lower_bound(entries.begin(), entries.end(), nb);
    // An id always carries the same distance for a given owner, so a duplicate
    // can only sit exactly at the lower bound.
    if (pos != entries.end() && pos->id == nb.id) return false;
    entries.insert(pos, nb);
    if (entries.size() > capacity) entries.pop_back();
    return true;
}

namespace {

std::vector<ObjectId> random_distinct(Rng& rng, std::size_t n, std::uint32_t count,
                                      ObjectId exclude) {
    std::vector<ObjectId> out;
    out.reserve(count);
    if (static_cast<std::size_t>(count) * 2 >= n) {
        std::vector<ObjectId> pool;
        pool.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            if (static_cast<ObjectId>(i) != exclude) pool.push_back(static_cast<ObjectId>(i));
        for (std::uint32_t i = 0; i < count; ++i) {
            const std::size_t j = i + uniform_index(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    } else {
        while (out.size() < count) {
            const auto cand = static_cast<ObjectId>(uniform_index(rng, n));
            if (cand == exclude) continue;
            if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
        }
    }
    return out;
}

void seed_random_lists(const Dataset& ds, std::vector<NeighborList>& lists,
                       const std::vector<ObjectId>& targets, std::uint32_t K,
                       std::uint64_t seed) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(targets.size()); ++t) {
        const ObjectId p = targets[static_cast<std::size_t>(t)];
        Rng rng(derive_seed(seed, 0x696e6974ULL + p));
        for (ObjectId q : random_distinct(rng, ds.size(), K, p))
            lists[p].insert({ds.distance(p, q), q});
    }
}

// One snapshot pass per iteration: every thread reads the previous lists and
// reverse index and writes only the list it owns, so results are identical at
// any thread count. Flags mark objects whose similar list (AKNNs or reverse
// AKNNs) changed; a quiet pair is provably safe to skip because insertion
// thresholds only tighten over time.
std::uint32_t run_iterations(const Dataset& ds, std::vector<NeighborList>& lists,
                             std::vector<char>& flags, std::uint32_t max_iters, bool use_skip) {
    const std::size_t n = lists.size();
    std::uint32_t executed = 0;
    std::vector<std::vector<ObjectId>> rev(n);

    while (executed < max_iters) {
        ++executed;
        for (auto& r : rev) r.clear();
        for (std::size_t p = 0; p < n; ++p)
            for (const auto& nb : lists[p].entries) rev[nb.id].push_back(static_cast<ObjectId>(p));
        const std::vector<NeighborList> prev = lists;
        const std::vector<char> prev_flags = flags;

#pragma omp parallel
        {
            std::vector<std::uint32_t> seen(n, 0);
            std::vector<ObjectId> similar;
#pragma omp for schedule(dynamic, 64)
            for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
                const auto p = static_cast<ObjectId>(pi);
                const std::uint32_t mark = p + 1;
                seen[p] = mark;
                for (const auto& nb : prev[p].entries) seen[nb.id] = mark;

                similar.clear();
                for (const auto& nb : prev[p].entries) similar.push_back(nb.id);
                for (ObjectId x : rev[p])
                    if (!prev[p].contains(x)) similar.push_back(x);

                NeighborList& work = lists[p];
                auto try_candidate = [&](ObjectId z) {
                    if (z == p || seen[z] == mark) return;
                    seen[z] = mark;
                    work.insert({ds.distance(p, z), z});
                };
                for (ObjectId q : similar) {
                    if (use_skip && !prev_flags[q] && !prev_flags[p]) continue;
                    try_candidate(q);
                    for (const auto& nb : prev[q].entries) try_candidate(nb.id);
                    for (ObjectId x : rev[q]) try_candidate(x);
                }
            }
        }

        std::size_t changed = 0;
        std::fill(flags.begin(), flags.end(), 0);
        std::vector<ObjectId> before, after, moved;
        for (std::size_t p = 0; p < n; ++p) {
            if (lists[p].entries == prev[p].entries) continue;
            ++changed;
            flags[p] = 1;
            before.clear();
            after.clear();
            moved.clear();
            for (const auto& nb : prev[p].entries) before.push_back(nb.id);
            for (const auto& nb : lists[p].entries) after.push_back(nb.id);
            std::sort(before.begin(), before.end());
            std::sort(after.begin(), after.end());
            std::set_symmetric_difference(before.begin(), before.end(), after.begin(),
                                          after.end(), std::back_inserter(moved));
            for (ObjectId x : moved) flags[x] = 1;  // entered or left a reverse set
        }
        if (changed == 0) break;
    }
    return executed;
}

}  // namespace

AknnGraph nndescent(const Dataset& ds, std::uint32_t K, std::uint32_t max_iters,
                    std::uint64_t seed) {
    if (K == 0) throw ConfigError("K must be positive");
    if (K >= ds.size()) throw ConfigError("K must be smaller than the dataset size");
    AknnGraph g;
    g.K = K;
    g.lists.assign(ds.size(), NeighborList{{}, K});
    std::vector<ObjectId> all(ds.size());
    std::iota(all.begin(), all.end(), ObjectId{0});
    seed_random_lists(ds, g.lists, all, K, derive_seed(seed, 0x6e6e64ULL));
    g.updated.assign(ds.size(), 1);
    g.iterations = run_iterations(ds, g.lists, g.updated, max_iters, /*use_skip=*/false);
    return g;
}

NnPlusOutput nndescent_plus(const Dataset& ds, const BuildParams& params) {
    const std::size_t n = ds.size();
    const std::uint32_t K = params.K;
    if (K == 0) throw ConfigError("K must be positive");
    if (K >= n) throw ConfigError("K must be smaller than the dataset size");
    if (params.K_prime && params.K_prime < K) throw ConfigError("K' must be at least K");

    NnPlusOutput out;
    AknnGraph& g = out.graph;
    g.K = K;
    g.lists.assign(n, NeighborList{{}, K});

    const auto c = std::max<std::size_t>(2 * static_cast<std::size_t>(K), 2);
    auto part = partition_for_init(ds, c, params.repeats, derive_seed(params.seed, 0x706c7573ULL));
    out.pivots = std::move(part.pivots);

    // Groups of one pass are disjoint, so each pass seeds in parallel.
    for (std::size_t pass = 0; pass < part.pass_begins.size(); ++pass) {
        const std::size_t lo = part.pass_begins[pass];
        const std::size_t hi =
            pass + 1 < part.pass_begins.size() ? part.pass_begins[pass + 1] : part.groups.size();
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t gi = static_cast<std::ptrdiff_t>(lo);
             gi < static_cast<std::ptrdiff_t>(hi); ++gi) {
            const auto& group = part.groups[static_cast<std::size_t>(gi)];
            for (std::size_t i = 0; i < group.size(); ++i)
                for (std::size_t j = i + 1; j < group.size(); ++j) {
                    const double d = ds.distance(group[i], group[j]);
                    g.lists[group[i]].insert({d, group[j]});
                    g.lists[group[j]].insert({d, group[i]});
                }
        }
    }

    // Objects no pass covered (and degenerate single-member groups) start from
    // random AKNNs instead.
    std::vector<ObjectId> empty_ids;
    for (std::size_t p = 0; p < n; ++p)
        if (g.lists[p].entries.empty()) empty_ids.push_back(static_cast<ObjectId>(p));
    seed_random_lists(ds, g.lists, empty_ids, K, derive_seed(params.seed, 0x66616c6cULL));

    g.updated.assign(n, 1);
    g.iterations = run_iterations(ds, g.lists, g.updated, params.max_iters, !params.disable_skip);

    // Objects whose lists still look poor get exact K'-NNs by linear scan.
    const auto m = std::min<std::uint32_t>(params.resolved_m(n), static_cast<std::uint32_t>(n));
    const auto kp =
        std::min<std::uint32_t>(params.resolved_K_prime(), static_cast<std::uint32_t>(n - 1));
    std::vector<std::pair<double, ObjectId>> rank(n);
    for (std::size_t p = 0; p < n; ++p) {
        double sum = 0.0;
        for (const auto& nb : g.lists[p].entries) sum += nb.dist;
        const double mean =
            g.lists[p].entries.empty() ? 0.0 : sum / static_cast<double>(g.lists[p].entries.size());
        rank[p] = {-mean, static_cast<ObjectId>(p)};
    }
    std::partial_sort(rank.begin(), rank.begin() + m, rank.end());
    out.exact_flagged.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) out.exact_flagged[i] = rank[i].second;
    std::sort(out.exact_flagged.begin(), out.exact_flagged.end());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        const ObjectId p = out.exact_flagged[static_cast<std::size_t>(i)];
        g.lists[p] = exact_knn(ds, p, kp);
    }
    return out;
}

NeighborList exact_knn(const Dataset& ds, ObjectId id, std::uint32_t K_prime) {
    if (K_prime == 0) throw ConfigError("K' must be positive");
    if (K_prime >= ds.size()) throw ConfigError("K' must be smaller than the dataset size");
    NeighborList list{{}, K_prime};
    for (std::size_t q = 0; q < ds.size(); ++q)
        if (static_cast<ObjectId>(q) != id)
            list.insert({ds.distance(id, static_cast<ObjectId>(q)), static_cast<ObjectId>(q)});
    return list;
}

}  // namespace dod
