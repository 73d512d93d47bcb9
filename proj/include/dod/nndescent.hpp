#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/types.hpp"

namespace dod {

struct Neighbor {
    double dist = 0.0;
    ObjectId id = 0;

    friend bool operator<(const Neighbor& a, const Neighbor& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
    }
    friend bool operator==(const Neighbor& a, const Neighbor& b) {
        return a.dist == b.dist && a.id == b.id;
    }
};

// Fixed-capacity candidate list, ascending by (dist, id), ids unique.
struct NeighborList {
    std::vector<Neighbor> entries;
    std::uint32_t capacity = 0;

    // Keeps the list sorted; rejects duplicates and, once full, anything not
    // strictly better than the current worst. Returns true when inserted.
    bool insert(Neighbor nb);
    bool contains(ObjectId id) const {
        return std::any_of(entries.begin(), entries.end(),
                           [id](const Neighbor& n) { return n.id == id; });
    }
    bool full() const { return entries.size() >= capacity; }
};

struct AknnGraph {
    std::vector<NeighborList> lists;
    std::vector<char> updated;  // similar-list change flags from the last pass
    std::uint32_t K = 0;
    std::uint32_t iterations = 0;  // passes executed, including the final quiet one
};

struct BuildParams {
    std::uint32_t K = 25;
    std::uint32_t K_prime = 0;  // 0 -> 4K
    std::uint32_t m = 0;        // 0 -> max(ceil(n/1000), 10)
    std::uint32_t max_iters = 12;
    std::uint32_t repeats = 3;  // partitioning passes
    std::uint64_t seed = 1;
    bool disable_skip = false;  // test hook: consult every similar list each pass

    // Graph refinement knobs; zeros fall back to the K-scaled defaults.
    std::uint32_t V_piv_size = 5;
    std::uint32_t sample_size = 0;        // 0 -> ceil(n/K)
    std::uint32_t pivot_sample_size = 0;  // 0 -> K
    std::uint32_t cap = 0;                // 0 -> K*K
    std::uint32_t max_hops = 10;          // greedy search budget
    double edge_bound_c = 8.0;            // edge count must stay <= C*n*K

    std::uint32_t resolved_K_prime() const { return K_prime ? K_prime : 4 * K; }
    std::uint32_t resolved_m(std::size_t n) const {
        if (m) return m;
        const std::size_t by_n = (n + 999) / 1000;
        return static_cast<std::uint32_t>(std::max<std::size_t>(by_n, 10));
    }
    std::uint32_t resolved_sample_size(std::size_t n) const {
        return sample_size ? sample_size : static_cast<std::uint32_t>((n + K - 1) / K);
    }
    std::uint32_t resolved_pivot_sample_size() const {
        return pivot_sample_size ? pivot_sample_size : K;
    }
    std::uint32_t resolved_cap() const { return cap ? cap : K * K; }
};

AknnGraph nndescent(const Dataset& ds, std::uint32_t K, std::uint32_t max_iters,
                    std::uint64_t seed);

struct NnPlusOutput {
    AknnGraph graph;
    std::vector<ObjectId> pivots;         // sorted, unique
    std::vector<ObjectId> exact_flagged;  // sorted; lists hold exact K'-NNs
};

NnPlusOutput nndescent_plus(const Dataset& ds, const BuildParams& params);

// Exact K'-NN of one object by linear scan, ties broken by id.
NeighborList exact_knn(const Dataset& ds, ObjectId id, std::uint32_t K_prime);

}  // namespace dod
