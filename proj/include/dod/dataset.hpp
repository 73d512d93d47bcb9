#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dod/types.hpp"

namespace dod {

enum class MetricKind { L1, L2, L4, Angular, Edit };

const char* metric_name(MetricKind m);
MetricKind metric_from_name(const std::string& name);

struct DistanceCounter {
    std::uint64_t count = 0;
    void merge(const DistanceCounter& other) { count += other.count; }
};

// Immutable object collection plus its metric. Vector data is stored row-major;
// Edit data stores one string per object. Shareable across threads after load.
class Dataset {
public:
    static Dataset from_vectors(std::vector<double> data, std::size_t dim, MetricKind metric);
    static Dataset from_strings(std::vector<std::string> items);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    MetricKind metric() const { return metric_; }
    bool is_vector_data() const { return metric_ != MetricKind::Edit; }

    std::span<const double> vec(ObjectId id) const {
        return {data_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    const std::string& str(ObjectId id) const { return strings_[id]; }

    double distance(ObjectId a, ObjectId b) const;
    double distance_counted(ObjectId a, ObjectId b, DistanceCounter& counter) const {
        ++counter.count;
        return distance(a, b);
    }

    // FNV-1a over metric tag, n, dim and object payloads; binds graph files to
    // the dataset they were built from.
    std::uint64_t content_checksum() const { return checksum_; }

    // New dataset holding the selected rows in the given order, same metric.
    Dataset subset(const std::vector<ObjectId>& ids) const;

private:
    Dataset() = default;
    void compute_checksum();

    MetricKind metric_ = MetricKind::L2;
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
    std::vector<double> norms_;  // Angular only
    std::vector<std::string> strings_;
    std::uint64_t checksum_ = 0;
};

// Full-matrix Levenshtein distance.
unsigned edit_distance(const std::string& a, const std::string& b);

}  // namespace dod
