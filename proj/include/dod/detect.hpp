#pragma once

#include <cstdint>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/mrpg.hpp"
#include "dod/types.hpp"
#include "dod/vptree.hpp"

namespace dod {

enum class VerifyMode { VpTree, LinearScan, Auto };
enum class CountMode { VpTree, LinearScan };

struct DodParams {
    double r = 1.0;
    std::uint32_t k = 1;
    std::uint32_t threads = 1;
    VerifyMode verify_mode = VerifyMode::Auto;
    std::uint64_t seed = 1;  // drives the work permutation and the auto-mode estimator
};

struct DodResult {
    std::vector<ObjectId> outliers;           // ascending; the exact answer
    std::vector<ObjectId> candidates;         // ascending; objects the filter could not clear
    std::vector<ObjectId> shortcut_outliers;  // ascending; confirmed from stored exact lists
    std::size_t candidate_count = 0;          // == candidates.size()
    std::size_t shortcut_count = 0;           // decided without verification
    std::size_t verified_count = 0;           // exact-counting calls issued
    double filter_seconds = 0.0;
    double verify_seconds = 0.0;
    std::uint64_t distance_evals = 0;
    double rho = 0.0;  // mean vertices visited per greedy-counting run

    std::size_t outlier_count() const { return outliers.size(); }  // t
    std::size_t false_positive_count() const { return candidate_count - outliers.size(); }  // f
};

// Per-query visitation stamps; reset is O(1) via epoch bump.
class VisitMarker {
  public:
    explicit VisitMarker(std::size_t n) : stamp_(n, 0) {}
    void reset() {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    // Returns previous state and marks v.
    bool test_and_set(ObjectId v) {
        if (stamp_[v] == epoch_) return true;
        stamp_[v] = epoch_;
        return false;
    }
    bool test(ObjectId v) const { return stamp_[v] == epoch_; }

  private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

struct GreedyScratch {
    VisitMarker marker;
    std::vector<ObjectId> queue;
    explicit GreedyScratch(std::size_t n) : marker(n) { queue.reserve(n); }
};

// FIFO traversal from p's vertex. Every scanned vertex gets one distance
// evaluation; within-range vertices are counted and expanded, pivots are
// expanded even outside the range, everything else is dropped. Returns as soon
// as the count hits k. Never counts p.
std::uint32_t greedy_counting(const Mrpg& g, const Dataset& ds, ObjectId p, double r,
                              std::uint32_t k, GreedyScratch& scratch,
                              std::uint64_t* distance_evals = nullptr,
                              std::uint64_t* vertices_visited = nullptr);
std::uint32_t greedy_counting(const Mrpg& g, const Dataset& ds, ObjectId p, double r,
                              std::uint32_t k);

// min(k, exact neighbor count of p within r); both modes terminate early at k.
std::uint32_t exact_counting(const Dataset& ds, const VpTree* tree, ObjectId p, double r,
                             std::uint32_t k, CountMode mode,
                             DistanceCounter* distance_evals = nullptr);

// Maximum-likelihood intrinsic dimensionality from sampled nearest-neighbor
// distances; auto verification picks the VP-tree below 5.
double estimate_intrinsic_dim(const Dataset& ds, std::uint64_t seed);

// Two-phase exact detection. Phase 1 clears or confirms objects via stored
// exact lists (when flagged and k <= K') or greedy counting; phase 2 runs
// exact counting on the surviving candidates. detect is single-threaded;
// detect_partitioned splits a seeded permutation into contiguous chunks per
// worker and produces identical output at any thread count.
DodResult detect(const Dataset& ds, const Mrpg& g, const VpTree* tree, const DodParams& params);
DodResult detect_partitioned(const Dataset& ds, const Mrpg& g, const VpTree* tree,
                             const DodParams& params);

}  // namespace dod
