#pragma once

#include <cstdint>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/mrpg.hpp"
#include "dod/types.hpp"

namespace dod {

struct OracleReport {
    std::vector<ObjectId> outliers;              // ascending
    std::vector<std::uint64_t> neighbor_counts;  // per object; exact totals unless capped
    double seconds = 0.0;
};

// Quadratic reference answer, parallel over rows, no shared code with the
// engine's counting paths. capped_at_k stops each row at k (the classic
// nested-loop baseline, for timing); counts are then min(k, true count).
// Either way neighbor_counts[p] < k exactly characterizes the outliers.
OracleReport brute_force_outliers(const Dataset& ds, double r, std::uint32_t k,
                                  bool capped_at_k = false);

// True iff some path p -> q never decreases distance-to-p along the way.
// Admissibility depends only on edge endpoints, so one filtered BFS decides it.
bool monotone_reachability(const Adjacency& adj, const Dataset& ds, ObjectId p, ObjectId q);

// Fraction of sampled ordered pairs (p, q) with dist(p, q) <= r that admit a
// monotone path. Sampling is seeded; pairs outside r are skipped. Returns 1
// when no qualifying pair can be found.
double monotone_path_density(const Adjacency& adj, const Dataset& ds, double r,
                             std::size_t samples, std::uint64_t seed);

}  // namespace dod
