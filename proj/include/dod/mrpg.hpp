#pragma once

#include <cstdint>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/nndescent.hpp"
#include "dod/types.hpp"

namespace dod {

using Adjacency = std::vector<std::vector<ObjectId>>;  // sorted, self-free, duplicate-free

// Proximity graph driving the filtering phase. For the refined variants the
// adjacency is undirected and connected; pivot vertices are traversal
// pass-through points, and exact-flagged vertices keep their K'-NN lists so
// small-k queries can be answered from stored distances alone.
struct Mrpg {
    Adjacency adj;
    std::vector<char> is_pivot;
    std::vector<char> has_exact;
    std::vector<std::pair<ObjectId, NeighborList>> exact_lists;  // ascending by id
    std::uint32_t K = 0;
    std::uint32_t K_prime = 0;

    std::size_t size() const { return adj.size(); }
    std::size_t total_links() const;
    std::size_t edges() const { return total_links() / 2; }
    const NeighborList* exact_list_of(ObjectId id) const;
};

// Source is the object whose distance ordering was violated on the BFS path
// that discovered target.
struct DetourPair {
    ObjectId source = 0;
    ObjectId target = 0;
    double dist = 0.0;
};

// Sorted-insert/remove an undirected edge; returns false when it was a no-op
// (present already, absent already, or a == b).
bool add_edge(Adjacency& adj, ObjectId a, ObjectId b);
bool remove_edge(Adjacency& adj, ObjectId a, ObjectId b);
bool has_edge(const Adjacency& adj, ObjectId a, ObjectId b);

// Mirrors every directed AKNN link that is not already reciprocated.
Adjacency symmetrize(const AknnGraph& g);

// Greedy hill-descent toward query: hop to the neighbor closest to query while
// that improves, up to max_hops hops. The query vertex itself is never entered.
ObjectId ann_search(const Adjacency& adj, const Dataset& ds, ObjectId start, ObjectId query,
                    std::uint32_t max_hops);

// Stitches disjoint sub-graphs: BFS marks a region, then a random unvisited
// pivot is linked to the best greedy-search result started from a few visited
// pivots, and BFS resumes from the freshly bridged pivot. Resuming there (not
// from a random unvisited object) is what guarantees one component at the end.
void connect_subgraphs(Adjacency& adj, const Dataset& ds, const std::vector<ObjectId>& pivots,
                       std::uint32_t V_piv_size, std::uint32_t max_hops, std::uint64_t seed);

// Hop-limited BFS from start recording every vertex whose discovered path has a
// distance-to-p decrease anywhere along it (monotone prefix tracking). Result
// ascending by (dist, id), truncated to cap.
std::vector<DetourPair> get_non_monotonic(const Adjacency& adj, const Dataset& ds, ObjectId p,
                                          ObjectId start, std::uint32_t hop_limit,
                                          std::uint32_t cap);

// Samples targets (pivot-weighted, exact-flagged objects excluded), gathers
// non-monotonic vertices via 3-hop BFS from each target plus 2-hop BFS from
// nearby pivots, then chain-links each sorted result array.
void remove_detours(Adjacency& adj, const Dataset& ds, const std::vector<ObjectId>& pivots,
                    const std::vector<char>& exact_flag, std::uint32_t sample_size,
                    std::uint32_t pivot_sample_size, std::uint32_t cap, std::uint64_t seed);

// Drops the direct link from a non-pivot to a common neighbor it shares with an
// adjacent pivot; the two-hop route through the pivot survives, and commits are
// re-validated serially so the witness path always outlives the removal.
void remove_links(Adjacency& adj, const std::vector<char>& pivot_mask);

struct BuildTimings {
    double nndescent_seconds = 0.0;
    double connect_seconds = 0.0;
    double detours_seconds = 0.0;
    double links_seconds = 0.0;
};

Mrpg build_mrpg(const Dataset& ds, const BuildParams& params, BuildTimings* timings = nullptr);

// Plain NNDescent output viewed as a directed graph: no pivots, no exact lists.
Mrpg build_kgraph(const Dataset& ds, const BuildParams& params, BuildTimings* timings = nullptr);

// Unbounded detour search for every object followed by chain-linking; also
// links vertices unreachable from p so the result is connected. Quadratic;
// refuses n > 2000.
Adjacency build_msg_oracle(const Dataset& ds, Adjacency base);

}  // namespace dod
