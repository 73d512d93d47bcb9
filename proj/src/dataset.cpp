#include "dod/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dod {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

}  // namespace

const char* metric_name(MetricKind m) {
    switch (m) {
        case MetricKind::L1: return "l1";
        case MetricKind::L2: return "l2";
        case MetricKind::L4: return "l4";
        case MetricKind::Angular: return "angular";
        case MetricKind::Edit: return "edit";
    }
    return "?";
}

MetricKind metric_from_name(const std::string& name) {
    if (name == "l1") return MetricKind::L1;
    if (name == "l2") return MetricKind::L2;
    if (name == "l4") return MetricKind::L4;
    if (name == "angular") return MetricKind::Angular;
    if (name == "edit") return MetricKind::Edit;
    throw ConfigError("unknown metric: " + name);
}

Dataset Dataset::from_vectors(std::vector<double> data, std::size_t dim, MetricKind metric) {
    if (metric == MetricKind::Edit) throw ConfigError("edit metric requires string data");
    if (dim == 0) throw ConfigError("vector dataset needs dim > 0");
    if (data.empty()) throw ConfigError("dataset is empty");
    if (data.size() % dim != 0) throw ConfigError("vector data size not divisible by dim");
    Dataset d;
    d.metric_ = metric;
    d.dim_ = dim;
    d.n_ = data.size() / dim;
    d.data_ = std::move(data);
    if (metric == MetricKind::Angular) {
        d.norms_.resize(d.n_);
        for (std::size_t i = 0; i < d.n_; ++i) {
            double s = 0.0;
            const double* v = d.data_.data() + i * dim;
            for (std::size_t j = 0; j < dim; ++j) s += v[j] * v[j];
            if (s == 0.0) throw ConfigError("angular metric rejects zero vectors (object " + std::to_string(i) + ")");
            d.norms_[i] = std::sqrt(s);
        }
    }
    d.compute_checksum();
    return d;
}

Dataset Dataset::from_strings(std::vector<std::string> items) {
    if (items.empty()) throw ConfigError("dataset is empty");
    Dataset d;
    d.metric_ = MetricKind::Edit;
    d.n_ = items.size();
    d.strings_ = std::move(items);
    d.compute_checksum();
    return d;
}

void Dataset::compute_checksum() {
    std::uint64_t h = kFnvOffset;
    const std::uint32_t tag = static_cast<std::uint32_t>(metric_);
    const std::uint64_t n64 = n_, d64 = dim_;
    h = fnv1a(h, &tag, sizeof tag);
    h = fnv1a(h, &n64, sizeof n64);
    h = fnv1a(h, &d64, sizeof d64);
    if (metric_ == MetricKind::Edit) {
        for (const auto& s : strings_) {
            const std::uint64_t len = s.size();
            h = fnv1a(h, &len, sizeof len);
            h = fnv1a(h, s.data(), s.size());
        }
    } else {
        h = fnv1a(h, data_.data(), data_.size() * sizeof(double));
    }
    checksum_ = h;
}

double Dataset::distance(ObjectId a, ObjectId b) const {
    switch (metric_) {
        case MetricKind::L1: {
            const double* x = data_.data() + static_cast<std::size_t>(a) * dim_;
            const double* y = data_.data() + static_cast<std::size_t>(b) * dim_;
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += std::abs(x[j] - y[j]);
            return s;
        }
        case MetricKind::L2: {
            const double* x = data_.data() + static_cast<std::size_t>(a) * dim_;
            const double* y = data_.data() + static_cast<std::size_t>(b) * dim_;
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) {
                const double d = x[j] - y[j];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case MetricKind::L4: {
            const double* x = data_.data() + static_cast<std::size_t>(a) * dim_;
            const double* y = data_.data() + static_cast<std::size_t>(b) * dim_;
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) {
                const double d = x[j] - y[j];
                const double d2 = d * d;
                s += d2 * d2;
            }
            return std::sqrt(std::sqrt(s));
        }
        case MetricKind::Angular: {
            if (a == b) return 0.0;  // acos(dot/norms) rounds away from exact zero
            const double* x = data_.data() + static_cast<std::size_t>(a) * dim_;
            const double* y = data_.data() + static_cast<std::size_t>(b) * dim_;
            double dot = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) dot += x[j] * y[j];
            double c = dot / (norms_[a] * norms_[b]);
            c = std::clamp(c, -1.0, 1.0);
            return std::acos(c);
        }
        case MetricKind::Edit:
            return static_cast<double>(edit_distance(strings_[a], strings_[b]));
    }
    return 0.0;
}

Dataset Dataset::subset(const std::vector<ObjectId>& ids) const {
    for (ObjectId id : ids)
        if (id >= n_) throw ConfigError("subset id out of range");
    if (metric_ == MetricKind::Edit) {
        std::vector<std::string> rows;
        rows.reserve(ids.size());
        for (ObjectId id : ids) rows.push_back(strings_[id]);
        return from_strings(std::move(rows));
    }
    std::vector<double> rows;
    rows.reserve(ids.size() * dim_);
    for (ObjectId id : ids) {
        const auto v = vec(id);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    return from_vectors(std::move(rows), dim_, metric_);
}

unsigned edit_distance(const std::string& a, const std::string& b) {
    const std::size_t la = a.size(), lb = b.size();
    if (la == 0) return static_cast<unsigned>(lb);
    if (lb == 0) return static_cast<unsigned>(la);
    std::vector<unsigned> prev(lb + 1), cur(lb + 1);
    for (std::size_t j = 0; j <= lb; ++j) prev[j] = static_cast<unsigned>(j);
    for (std::size_t i = 1; i <= la; ++i) {
        cur[0] = static_cast<unsigned>(i);
        for (std::size_t j = 1; j <= lb; ++j) {
            const unsigned sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u);
            cur[j] = std::min({prev[j] + 1u, cur[j - 1] + 1u, sub});
        }
        std::swap(prev, cur);
    }
    return prev[lb];
}

}  // namespace dod
