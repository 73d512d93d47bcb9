#pragma once

#include <cstdint>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/types.hpp"

namespace dod {

// Ball-partitioned metric tree. Internal nodes route by the mean distance mu to
// a vantage object; the vantage sorts into its own left subtree, so every
// object lives in exactly one leaf. Queries are read-only and thread-safe.
class VpTree {
public:
    struct Node {
        ObjectId vantage = 0;
        double mu = 0.0;
        std::int32_t left = -1;   // node index, -1 when leaf
        std::int32_t right = -1;
        std::uint32_t begin = 0;  // leaf slice into members()
        std::uint32_t end = 0;
    };

    // Number of objects within distance r of q, excluding q itself, capped at
    // k; traversal stops the moment the count reaches k.
    std::uint32_t range_count(ObjectId q, double r, std::uint32_t k,
                              DistanceCounter* counter = nullptr) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<ObjectId>& members() const { return members_; }
    std::int32_t root() const { return root_; }
    std::size_t capacity() const { return capacity_; }

private:
    friend VpTree build_vptree(const Dataset& ds, std::size_t c, std::uint64_t seed);

    const Dataset* ds_ = nullptr;
    std::size_t capacity_ = 0;
    std::int32_t root_ = -1;
    std::vector<Node> nodes_;
    std::vector<ObjectId> members_;  // leaf storage, one contiguous slice per leaf
};

VpTree build_vptree(const Dataset& ds, std::size_t c, std::uint64_t seed);

struct PartitionOutput {
    std::vector<std::vector<ObjectId>> groups;  // left-leaf member lists, all passes
    std::vector<std::size_t> pass_begins;       // index into groups where each pass starts
    std::vector<ObjectId> pivots;               // sorted, unique across passes
    std::vector<ObjectId> uncovered;            // never captured in any left leaf
};

// Runs the leaf partitioning `repeats` times with fresh vantages and collects
// the left-leaf groups, the vantages whose left child became a leaf (pivots),
// and the residual objects no pass ever covered.
PartitionOutput partition_for_init(const Dataset& ds, std::size_t c, std::size_t repeats,
                                   std::uint64_t seed);

}  // namespace dod
