#include "dod/vptree.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "dod/rng.hpp"

namespace dod {
namespace {

// Splits members around a randomly chosen vantage; mu is the mean distance
// from the vantage to the other members, and the vantage itself sorts left.
// Returns false when three vantage draws in a row fail to separate the set
// (everything equidistant), in which case the caller emits an oversized leaf.
bool split_members(const Dataset& ds, const std::vector<ObjectId>& members, Rng& rng,
                   ObjectId& vantage, double& mu,
                   std::vector<ObjectId>& left, std::vector<ObjectId>& right) {
    std::vector<double> dist(members.size());
    for (int attempt = 0; attempt < 3; ++attempt) {
        const ObjectId v = members[uniform_index(rng, members.size())];
        double sum = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            dist[i] = members[i] == v ? 0.0 : ds.distance(v, members[i]);
            sum += dist[i];
        }
        const double m = sum / static_cast<double>(members.size() - 1);
        left.clear();
        right.clear();
        for (std::size_t i = 0; i < members.size(); ++i)
            (dist[i] <= m ? left : right).push_back(members[i]);
        if (!right.empty()) {
            vantage = v;
            mu = m;
            return true;
        }
    }
    return false;
}

}  // namespace

VpTree build_vptree(const Dataset& ds, std::size_t c, std::uint64_t seed) {
    if (c < 2) throw ConfigError("vp-tree leaf capacity must be >= 2");
    VpTree t;
    t.ds_ = &ds;
    t.capacity_ = c;
    t.members_.reserve(ds.size());
    Rng rng(derive_seed(seed, 0x767074ULL));

    auto make_leaf = [&t](const std::vector<ObjectId>& members) -> std::int32_t {
        VpTree::Node node;
        node.begin = static_cast<std::uint32_t>(t.members_.size());
        t.members_.insert(t.members_.end(), members.begin(), members.end());
        node.end = static_cast<std::uint32_t>(t.members_.size());
        t.nodes_.push_back(node);
        return static_cast<std::int32_t>(t.nodes_.size() - 1);
    };

    auto rec = [&](auto&& self, std::vector<ObjectId> members) -> std::int32_t {
        if (members.size() <= c) return make_leaf(members);
        ObjectId v = 0;
        double mu = 0.0;
        std::vector<ObjectId> left, right;
        if (!split_members(ds, members, rng, v, mu, left, right)) return make_leaf(members);
        const std::int32_t li = self(self, std::move(left));
        const std::int32_t ri = self(self, std::move(right));
        VpTree::Node node;
        node.vantage = v;
        node.mu = mu;
        node.left = li;
        node.right = ri;
        t.nodes_.push_back(node);
        return static_cast<std::int32_t>(t.nodes_.size() - 1);
    };

    std::vector<ObjectId> all(ds.size());
    std::iota(all.begin(), all.end(), ObjectId{0});
    t.root_ = rec(rec, std::move(all));
    return t;
}

std::uint32_t VpTree::range_count(ObjectId q, double r, std::uint32_t k,
                                  DistanceCounter* counter) const {
    if (k == 0) return 0;
    const Dataset& ds = *ds_;
    auto dist = [&](ObjectId a, ObjectId b) {
        if (counter) ++counter->count;
        return ds.distance(a, b);
    };

    std::uint32_t count = 0;
    std::vector<std::int32_t> stack;
    stack.push_back(root_);
    while (!stack.empty()) {
        const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const ObjectId id = members_[i];
                if (id == q) continue;
                if (dist(q, id) <= r && ++count == k) return count;
            }
            continue;
        }
        const double dqv = dist(q, node.vantage);
        const bool take_left = dqv - node.mu <= r;
        const bool take_right = node.mu - dqv <= r;
        // LIFO stack: push the far side first so the nearer side pops first.
        if (dqv <= node.mu) {
            if (take_right) stack.push_back(node.right);
            if (take_left) stack.push_back(node.left);
        } else {
            if (take_left) stack.push_back(node.left);
            if (take_right) stack.push_back(node.right);
        }
    }
    return count;
}

PartitionOutput partition_for_init(const Dataset& ds, std::size_t c, std::size_t repeats,
                                   std::uint64_t seed) {
    if (c < 2) throw ConfigError("partition leaf capacity must be >= 2");
    const std::size_t n = ds.size();
    PartitionOutput out;
    std::vector<char> covered(n, 0);
    std::vector<char> is_pivot(n, 0);

    for (std::size_t pass = 0; pass < repeats; ++pass) {
        out.pass_begins.push_back(out.groups.size());
        Rng rng(derive_seed(seed, 0x70617274ULL + pass));
        auto emit_group = [&](std::vector<ObjectId> members) {
            for (ObjectId id : members) covered[id] = 1;
            out.groups.push_back(std::move(members));
        };
        // is_left: whether this subset sits at a left-child position; the root
        // counts as left so tiny datasets still produce one seed group.
        auto rec = [&](auto&& self, std::vector<ObjectId> members, bool is_left) -> void {
            if (members.size() <= c) {
                if (is_left) emit_group(std::move(members));
                return;
            }
            ObjectId v = 0;
            double mu = 0.0;
            std::vector<ObjectId> left, right;
            if (!split_members(ds, members, rng, v, mu, left, right)) {
                if (is_left) emit_group(std::move(members));
                return;
            }
            if (left.size() <= c) {
                is_pivot[v] = 1;
                emit_group(std::move(left));
            } else {
                self(self, std::move(left), true);
            }
            if (right.size() > c) self(self, std::move(right), false);
        };
        std::vector<ObjectId> all(n);
        std::iota(all.begin(), all.end(), ObjectId{0});
        rec(rec, std::move(all), true);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (is_pivot[i]) out.pivots.push_back(static_cast<ObjectId>(i));
        if (!covered[i]) out.uncovered.push_back(static_cast<ObjectId>(i));
    }
    return out;
}

}  // namespace dod
