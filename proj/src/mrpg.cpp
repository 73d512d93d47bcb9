#include "dod/mrpg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "dod/rng.hpp"

namespace dod {

std::size_t Mrpg::total_links() const {
    std::size_t total = 0;
    for (const auto& e : adj) total += e.size();
    return total;
}

const NeighborList* Mrpg::exact_list_of(ObjectId id) const {
    const auto pos =
        std::lower_bound(exact_lists.begin(), exact_lists.end(), id,
                         [](const auto& entry, ObjectId v) { return entry.first < v; });
    if (pos == exact_lists.end() || pos->first != id) return nullptr;
    return &pos->second;
}

bool has_edge(const Adjacency& adj, ObjectId a, ObjectId b) {
    const auto& v = adj[a];
    return std::binary_search(v.begin(), v.end(), b);
}

bool add_edge(Adjacency& adj, ObjectId a, ObjectId b) {
    if (a == b) return false;
    auto ins = [&adj](ObjectId x, ObjectId y) {
        auto& v = adj[x];
        const auto pos = std::lower_bound(v.begin(), v.end(), y);
        if (pos != v.end() && *pos == y) return false;
        v.insert(pos, y);
        return true;
    };
    const bool added = ins(a, b);
    ins(b, a);
    return added;
}

bool remove_edge(Adjacency& adj, ObjectId a, ObjectId b) {
    auto del = [&adj](ObjectId x, ObjectId y) {
        auto& v = adj[x];
        const auto pos = std::lower_bound(v.begin(), v.end(), y);
        if (pos == v.end() || *pos != y) return false;
        v.erase(pos);
        return true;
    };
    const bool removed = del(a, b);
    del(b, a);
    return removed;
}

Adjacency symmetrize(const AknnGraph& g) {
    const std::size_t n = g.lists.size();
    Adjacency adj(n);
    for (std::size_t p = 0; p < n; ++p)
        for (const auto& nb : g.lists[p].entries) {
            adj[p].push_back(nb.id);
            adj[nb.id].push_back(static_cast<ObjectId>(p));
        }
    for (auto& e : adj) {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }
    return adj;
}

ObjectId ann_search(const Adjacency& adj, const Dataset& ds, ObjectId start, ObjectId query,
                    std::uint32_t max_hops) {
    ObjectId cur = start;
    double cur_d = ds.distance(cur, query);
    for (std::uint32_t hop = 0; hop < max_hops; ++hop) {
        ObjectId best = cur;
        double best_d = cur_d;
        for (ObjectId w : adj[cur]) {
            if (w == query) continue;
            const double d = ds.distance(w, query);
            if (d < best_d) {
                best_d = d;
                best = w;
            }
        }
        if (best == cur) break;
        cur = best;
        cur_d = best_d;
    }
    return cur;
}

namespace {

// Reusable BFS state; epoch stamping makes resets O(1).
struct BfsScratch {
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> hop;
    std::vector<double> dist_p;
    std::vector<char> bad;  // distance-to-p order already violated on the path
    std::vector<ObjectId> queue;
    std::uint32_t epoch = 0;

    void ensure(std::size_t n) {
        if (stamp.size() < n) {
            stamp.assign(n, 0);
            hop.resize(n);
            dist_p.resize(n);
            bad.resize(n);
            epoch = 0;
        }
    }
    std::uint32_t next_epoch() {
        if (++epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
        return epoch;
    }
};

// BFS from start, tagging each discovered vertex with whether the tree path to
// it has any decrease in distance-to-p (a monotone path could not be
// confirmed). Vertices at hop_limit are recorded but not expanded. Flagged
// vertices land in `flagged`; pivots other than p land in `pivots_seen`.
void gnm_core(const Adjacency& adj, const Dataset& ds, ObjectId p, ObjectId start,
              std::uint32_t hop_limit, BfsScratch& s,
              std::vector<std::pair<double, ObjectId>>& flagged,
              std::vector<std::pair<double, ObjectId>>* pivots_seen,
              const std::vector<char>* pivot_mask) {
    const std::uint32_t ep = s.next_epoch();
    s.queue.clear();
    s.queue.push_back(start);
    s.stamp[start] = ep;
    s.hop[start] = 0;
    s.bad[start] = 0;
    s.dist_p[start] = start == p ? 0.0 : ds.distance(p, start);
    if (pivots_seen && start != p && (*pivot_mask)[start])
        pivots_seen->push_back({s.dist_p[start], start});

    for (std::size_t head = 0; head < s.queue.size(); ++head) {
        const ObjectId v = s.queue[head];
        if (s.hop[v] >= hop_limit) continue;
        for (ObjectId w : adj[v]) {
            if (s.stamp[w] == ep) continue;
            s.stamp[w] = ep;
            s.hop[w] = s.hop[v] + 1;
            const double dw = w == p ? 0.0 : ds.distance(p, w);
            s.dist_p[w] = dw;
            s.bad[w] = static_cast<char>(s.bad[v] || s.dist_p[v] > dw);
            if (s.bad[w] && w != p) flagged.push_back({dw, w});
            if (pivots_seen && w != p && (*pivot_mask)[w]) pivots_seen->push_back({dw, w});
            s.queue.push_back(w);
        }
    }
}

void sort_unique_cap(std::vector<std::pair<double, ObjectId>>& v, std::size_t cap) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() > cap) v.resize(cap);
}

}  // namespace

std::vector<DetourPair> get_non_monotonic(const Adjacency& adj, const Dataset& ds, ObjectId p,
                                          ObjectId start, std::uint32_t hop_limit,
                                          std::uint32_t cap) {
    BfsScratch scratch;
    scratch.ensure(adj.size());
    std::vector<std::pair<double, ObjectId>> flagged;
    gnm_core(adj, ds, p, start, hop_limit, scratch, flagged, nullptr, nullptr);
    sort_unique_cap(flagged, cap);
    std::vector<DetourPair> out;
    out.reserve(flagged.size());
    for (const auto& [d, id] : flagged) out.push_back({p, id, d});
    return out;
}

void connect_subgraphs(Adjacency& adj, const Dataset& ds, const std::vector<ObjectId>& pivots,
                       std::uint32_t V_piv_size, std::uint32_t max_hops, std::uint64_t seed) {
    const std::size_t n = adj.size();
    if (n == 0) return;
    std::vector<char> visited(n, 0);
    std::size_t remaining = n;
    std::vector<ObjectId> queue;
    queue.reserve(n);
    auto bfs_from = [&](ObjectId s) {
        if (visited[s]) return;
        queue.clear();
        queue.push_back(s);
        visited[s] = 1;
        --remaining;
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (ObjectId w : adj[queue[head]])
                if (!visited[w]) {
                    visited[w] = 1;
                    --remaining;
                    queue.push_back(w);
                }
    };

    Rng rng(derive_seed(seed, 0x636f6e6eULL));
    bfs_from(static_cast<ObjectId>(uniform_index(rng, n)));

    while (remaining > 0) {
        std::vector<ObjectId> piv_out, piv_in;  // pivots outside/inside the visited region
        for (ObjectId pv : pivots) (visited[pv] ? piv_in : piv_out).push_back(pv);

        ObjectId bridge;
        if (!piv_out.empty()) {
            bridge = piv_out[uniform_index(rng, piv_out.size())];
        } else {
            std::vector<ObjectId> rest;
            for (std::size_t i = 0; i < n; ++i)
                if (!visited[i]) rest.push_back(static_cast<ObjectId>(i));
            bridge = rest[uniform_index(rng, rest.size())];
        }

        std::vector<ObjectId> starts = piv_in;
        if (starts.empty())
            for (std::size_t i = 0; i < n; ++i)
                if (visited[i]) starts.push_back(static_cast<ObjectId>(i));
        const std::size_t draws = std::min<std::size_t>(std::max<std::uint32_t>(V_piv_size, 1),
                                                        starts.size());
        for (std::size_t i = 0; i < draws; ++i) {
            const std::size_t j = i + uniform_index(rng, starts.size() - i);
            std::swap(starts[i], starts[j]);
        }

        ObjectId best = bridge;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws; ++i) {
            const ObjectId got = ann_search(adj, ds, starts[i], bridge, max_hops);
            const double d = ds.distance(got, bridge);
            if (d < best_d) {
                best_d = d;
                best = got;
            }
        }
        if (best != bridge) add_edge(adj, bridge, best);
        // Resume at the bridged vertex so the freshly linked component joins
        // the visited region instead of floating unbridged.
        bfs_from(bridge);
    }
}

void remove_detours(Adjacency& adj, const Dataset& ds, const std::vector<ObjectId>& pivots,
                    const std::vector<char>& exact_flag, std::uint32_t sample_size,
                    std::uint32_t pivot_sample_size, std::uint32_t cap, std::uint64_t seed) {
    const std::size_t n = adj.size();
    std::vector<char> pivot_mask(n, 0);
    for (ObjectId pv : pivots) pivot_mask[pv] = 1;

    // Weighted reservoir keys: pivots draw with weight 4, everything else 1;
    // exact-flagged objects are never targets.
    Rng sampler(derive_seed(seed, 0x64657431ULL));
    std::vector<std::pair<double, ObjectId>> keyed;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_real(sampler, 0.0, 1.0);
        if (exact_flag[i]) continue;
        const double w = pivot_mask[i] ? 4.0 : 1.0;
        keyed.push_back({std::pow(u, 1.0 / w), static_cast<ObjectId>(i)});
    }
    const std::size_t take = std::min<std::size_t>(sample_size, keyed.size());
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take),
                      keyed.end(), [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
    std::vector<ObjectId> targets(take);
    for (std::size_t i = 0; i < take; ++i) targets[i] = keyed[i].second;

    // Discovery runs against the pass-start graph; links are committed after.
    std::vector<std::vector<std::pair<double, ObjectId>>> arrays(take);
#pragma omp parallel
    {
        BfsScratch scratch;
        scratch.ensure(n);
        std::vector<std::pair<double, ObjectId>> flagged, near_pivots;
        std::vector<ObjectId> chosen;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(take); ++ti) {
            const ObjectId p = targets[static_cast<std::size_t>(ti)];
            flagged.clear();
            near_pivots.clear();
            gnm_core(adj, ds, p, p, 3, scratch, flagged, &near_pivots, &pivot_mask);

            // Pivot helpers: nearest first, skipping 1-hop neighbors of p and
            // exact-flagged pivots; shortfall filled with random pivots.
            std::sort(near_pivots.begin(), near_pivots.end());
            chosen.clear();
            for (const auto& [d, pv] : near_pivots) {
                if (chosen.size() >= pivot_sample_size) break;
                if (exact_flag[pv] || has_edge(adj, p, pv)) continue;
                if (std::find(chosen.begin(), chosen.end(), pv) == chosen.end())
                    chosen.push_back(pv);
            }
            if (chosen.size() < pivot_sample_size && !pivots.empty()) {
                Rng fill(derive_seed(seed, 0x6465743200ULL + p));
                for (std::size_t tries = 4 * pivots.size() + 16;
                     tries > 0 && chosen.size() < pivot_sample_size; --tries) {
                    const ObjectId pv = pivots[uniform_index(fill, pivots.size())];
                    if (pv == p || exact_flag[pv] || has_edge(adj, p, pv)) continue;
                    if (std::find(chosen.begin(), chosen.end(), pv) != chosen.end()) continue;
                    chosen.push_back(pv);
                }
            }
            for (ObjectId pv : chosen) gnm_core(adj, ds, p, pv, 2, scratch, flagged, nullptr, nullptr);

            sort_unique_cap(flagged, cap);
            arrays[static_cast<std::size_t>(ti)] = flagged;
        }
    }

    for (std::size_t ti = 0; ti < take; ++ti) {
        ObjectId prev = targets[ti];
        for (const auto& [d, id] : arrays[ti]) {
            add_edge(adj, prev, id);
            prev = id;
        }
    }
}

void remove_links(Adjacency& adj, const std::vector<char>& pivot_mask) {
    const std::size_t n = adj.size();
    struct Removal {
        ObjectId p, x, witness;
    };
    std::vector<std::vector<Removal>> found(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
        const auto p = static_cast<ObjectId>(pi);
        if (pivot_mask[p]) continue;
        auto& out = found[p];
        for (ObjectId piv : adj[p]) {
            if (!pivot_mask[piv]) continue;
            const auto& a = adj[p];
            const auto& b = adj[piv];
            std::size_t i = 0, j = 0;
            while (i < a.size() && j < b.size()) {
                if (a[i] < b[j]) {
                    ++i;
                } else if (b[j] < a[i]) {
                    ++j;
                } else {
                    if (a[i] != piv && a[i] != p) out.push_back({p, a[i], piv});
                    ++i;
                    ++j;
                }
            }
        }
    }

    // Serial commit; every removal re-validates its witness path against the
    // current graph so reachability through the pivot is never lost.
    for (std::size_t p = 0; p < n; ++p)
        for (const Removal& rm : found[p]) {
            if (adj[rm.p].size() < 2) continue;  // degree floor
            if (!has_edge(adj, rm.p, rm.x)) continue;
            if (!has_edge(adj, rm.p, rm.witness)) continue;
            if (!has_edge(adj, rm.witness, rm.x)) continue;
            remove_edge(adj, rm.p, rm.x);
        }
}

namespace {

bool is_connected(const Adjacency& adj) {
    const std::size_t n = adj.size();
    if (n == 0) return true;
    std::vector<char> visited(n, 0);
    std::vector<ObjectId> queue{0};
    visited[0] = 1;
    std::size_t count = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (ObjectId w : adj[queue[head]])
            if (!visited[w]) {
                visited[w] = 1;
                ++count;
                queue.push_back(w);
            }
    return count == n;
}

}  // namespace

namespace {

double tick(std::chrono::steady_clock::time_point& mark) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - mark).count();
    mark = now;
    return elapsed;
}

}  // namespace

Mrpg build_mrpg(const Dataset& ds, const BuildParams& params, BuildTimings* timings) {
    const std::size_t n = ds.size();
    auto mark = std::chrono::steady_clock::now();
    auto plus = nndescent_plus(ds, params);

    Mrpg g;
    g.K = params.K;
    g.K_prime = std::min<std::uint32_t>(params.resolved_K_prime(), static_cast<std::uint32_t>(n - 1));
    g.is_pivot.assign(n, 0);
    for (ObjectId pv : plus.pivots) g.is_pivot[pv] = 1;
    g.has_exact.assign(n, 0);
    for (ObjectId ex : plus.exact_flagged) g.has_exact[ex] = 1;

    g.adj = symmetrize(plus.graph);
    if (timings) timings->nndescent_seconds = tick(mark);
    connect_subgraphs(g.adj, ds, plus.pivots, params.V_piv_size, params.max_hops,
                      derive_seed(params.seed, 0x434f4e4eULL));
    if (timings) timings->connect_seconds = tick(mark);
    remove_detours(g.adj, ds, plus.pivots, g.has_exact, params.resolved_sample_size(n),
                   params.resolved_pivot_sample_size(), params.resolved_cap(),
                   derive_seed(params.seed, 0x44455455ULL));
    if (timings) timings->detours_seconds = tick(mark);
    remove_links(g.adj, g.is_pivot);
    if (timings) timings->links_seconds = tick(mark);

    g.exact_lists.reserve(plus.exact_flagged.size());
    for (ObjectId ex : plus.exact_flagged)
        g.exact_lists.emplace_back(ex, std::move(plus.graph.lists[ex]));

    if (!is_connected(g.adj)) throw MismatchError("refined graph is not connected");
    const double bound = params.edge_bound_c * static_cast<double>(n) * g.K;
    if (static_cast<double>(g.edges()) > bound)
        throw MismatchError("refined graph exceeds its edge budget");
    return g;
}

Mrpg build_kgraph(const Dataset& ds, const BuildParams& params, BuildTimings* timings) {
    auto mark = std::chrono::steady_clock::now();
    auto base = nndescent(ds, params.K, params.max_iters, params.seed);
    if (timings) timings->nndescent_seconds = tick(mark);
    const std::size_t n = ds.size();
    Mrpg g;
    g.K = params.K;
    g.K_prime = params.K;
    g.adj.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& nb : base.lists[p].entries) g.adj[p].push_back(nb.id);
        std::sort(g.adj[p].begin(), g.adj[p].end());
    }
    g.is_pivot.assign(n, 0);
    g.has_exact.assign(n, 0);
    return g;
}

Adjacency build_msg_oracle(const Dataset& ds, Adjacency base) {
    const std::size_t n = base.size();
    if (n != ds.size()) throw ConfigError("adjacency does not match the dataset");
    if (n > 2000) throw ConfigError("monotone-graph oracle is quadratic; refusing n > 2000");

    std::vector<std::vector<std::pair<double, ObjectId>>> arrays(n);
#pragma omp parallel
    {
        BfsScratch scratch;
        scratch.ensure(n);
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
            const auto p = static_cast<ObjectId>(pi);
            auto& flagged = arrays[pi];
            gnm_core(base, ds, p, p, std::numeric_limits<std::uint32_t>::max(), scratch,
                     flagged, nullptr, nullptr);
            // Vertices BFS never reached have no path at all; link them in too.
            for (std::size_t x = 0; x < n; ++x)
                if (scratch.stamp[x] != scratch.epoch && static_cast<ObjectId>(x) != p)
                    flagged.push_back({ds.distance(p, static_cast<ObjectId>(x)),
                                       static_cast<ObjectId>(x)});
            std::sort(flagged.begin(), flagged.end());
            flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        ObjectId prev = static_cast<ObjectId>(p);
        for (const auto& [d, id] : arrays[p]) {
            add_edge(base, prev, id);
            prev = id;
        }
    }
    return base;
}

}  // namespace dod
