#include "dod/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "dod/rng.hpp"

namespace dod {

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value, const std::string& path) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError("truncated or unreadable file: " + path);
}

std::string trimmed(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

Dataset load_fvecs(const std::string& path, MetricKind metric) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path);
    std::vector<double> flat;
    std::int32_t dim0 = 0;
    std::size_t offset = 0;
    while (true) {
        std::int32_t dim = 0;
        in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
        if (in.eof() && in.gcount() == 0) break;
        if (!in || in.gcount() != sizeof(dim))
            throw IoError(path + ": truncated record header at byte " + std::to_string(offset));
        if (dim <= 0)
            throw IoError(path + ": non-positive dimension at byte " + std::to_string(offset));
        if (flat.empty()) {
            dim0 = dim;
        } else if (dim != dim0) {
            throw IoError(path + ": dimension drift at byte " + std::to_string(offset) +
                          " (expected " + std::to_string(dim0) + ", found " +
                          std::to_string(dim) + ")");
        }
        offset += sizeof(dim);
        std::vector<float> record(static_cast<std::size_t>(dim));
        in.read(reinterpret_cast<char*>(record.data()),
                static_cast<std::streamsize>(record.size() * sizeof(float)));
        if (!in)
            throw IoError(path + ": truncated record payload at byte " + std::to_string(offset));
        offset += record.size() * sizeof(float);
        for (float v : record) flat.push_back(static_cast<double>(v));
    }
    if (flat.empty()) throw IoError(path + ": no records");
    return Dataset::from_vectors(std::move(flat), static_cast<std::size_t>(dim0), metric);
}

Dataset load_csv(const std::string& path, MetricKind metric) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    std::vector<double> flat;
    std::size_t dim = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        line = trimmed(line);
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(row, cell, ',')) {
            try {
                flat.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
            }
            ++cols;
        }
        if (dim == 0) {
            dim = cols;
        } else if (cols != dim) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(dim) + " columns, found " + std::to_string(cols));
        }
    }
    if (flat.empty()) throw IoError(path + ": no records");
    return Dataset::from_vectors(std::move(flat), dim, metric);
}

Dataset load_words(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (!line.empty()) words.push_back(line);
    }
    if (words.empty()) throw IoError(path + ": no records");
    return Dataset::from_strings(std::move(words));
}

}  // namespace

const char* format_name(FileFormat f) {
    switch (f) {
        case FileFormat::Fvecs: return "fvecs";
        case FileFormat::Csv: return "csv";
        case FileFormat::Words: return "words";
    }
    return "?";
}

FileFormat format_from_name(const std::string& name) {
    if (name == "fvecs") return FileFormat::Fvecs;
    if (name == "csv") return FileFormat::Csv;
    if (name == "words") return FileFormat::Words;
    throw ConfigError("unknown format: " + name);
}

Dataset load_dataset(const std::string& path, FileFormat format, MetricKind metric) {
    if (format == FileFormat::Words) {
        if (metric != MetricKind::Edit)
            throw ConfigError("words datasets require the edit metric");
        return load_words(path);
    }
    if (metric == MetricKind::Edit)
        throw ConfigError("the edit metric requires the words format");
    return format == FileFormat::Fvecs ? load_fvecs(path, metric) : load_csv(path, metric);
}

void save_fvecs(const std::string& path, const std::vector<double>& flat, std::size_t dim) {
    if (dim == 0 || flat.size() % dim != 0) throw ConfigError("flat size not divisible by dim");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset: " + path);
    const auto dim32 = static_cast<std::int32_t>(dim);
    for (std::size_t i = 0; i < flat.size(); i += dim) {
        write_pod(out, dim32);
        for (std::size_t d = 0; d < dim; ++d) {
            const auto v = static_cast<float>(flat[i + d]);
            write_pod(out, v);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_csv(const std::string& path, const std::vector<double>& flat, std::size_t dim) {
    if (dim == 0 || flat.size() % dim != 0) throw ConfigError("flat size not divisible by dim");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < flat.size(); i += dim) {
        for (std::size_t d = 0; d < dim; ++d) {
            if (d) out << ',';
            out << flat[i + d];
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_words(const std::string& path, const std::vector<std::string>& words) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    for (const auto& w : words) out << w << '\n';
    if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr char kMagic[4] = {'D', 'O', 'D', 'G'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_graph(const std::string& path, const Mrpg& g, std::uint64_t dataset_checksum) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write graph: " + path);
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(g.size()));
    write_pod(out, g.K);
    write_pod(out, g.K_prime);
    write_pod(out, dataset_checksum);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto flags = static_cast<std::uint8_t>((g.is_pivot[p] ? 1 : 0) |
                                                     (g.has_exact[p] ? 2 : 0));
        write_pod(out, flags);
        write_pod(out, static_cast<std::uint32_t>(g.adj[p].size()));
        for (ObjectId w : g.adj[p]) write_pod(out, w);
    }
    write_pod(out, static_cast<std::uint64_t>(g.exact_lists.size()));
    for (const auto& [id, list] : g.exact_lists) {
        write_pod(out, id);
        write_pod(out, static_cast<std::uint32_t>(list.entries.size()));
        for (const Neighbor& nb : list.entries) {
            write_pod(out, nb.dist);
            write_pod(out, nb.id);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

GraphFile load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open graph: " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a graph file (bad magic)");
    std::uint32_t version = 0;
    read_pod(in, version, path);
    if (version != kVersion)
        throw IoError(path + ": unsupported graph version " + std::to_string(version));

    GraphFile file;
    std::uint64_t n64 = 0;
    read_pod(in, n64, path);
    read_pod(in, file.graph.K, path);
    read_pod(in, file.graph.K_prime, path);
    read_pod(in, file.dataset_checksum, path);
    if (file.graph.K == 0 || file.graph.K_prime < file.graph.K)
        throw IoError(path + ": corrupt header (K=" + std::to_string(file.graph.K) +
                      ", K'=" + std::to_string(file.graph.K_prime) + ")");
    const auto n = static_cast<std::size_t>(n64);

    Mrpg& g = file.graph;
    g.adj.resize(n);
    g.is_pivot.assign(n, 0);
    g.has_exact.assign(n, 0);
    std::size_t flagged = 0;
    for (std::size_t p = 0; p < n; ++p) {
        std::uint8_t flags = 0;
        read_pod(in, flags, path);
        if (flags & ~0x3u)
            throw IoError(path + ": corrupt flags for vertex " + std::to_string(p));
        g.is_pivot[p] = (flags & 1) != 0;
        g.has_exact[p] = (flags & 2) != 0;
        flagged += g.has_exact[p] ? 1 : 0;
        std::uint32_t degree = 0;
        read_pod(in, degree, path);
        auto& edges = g.adj[p];
        edges.resize(degree);
        for (std::uint32_t i = 0; i < degree; ++i) {
            read_pod(in, edges[i], path);
            if (edges[i] >= n || edges[i] == p)
                throw IoError(path + ": corrupt edge on vertex " + std::to_string(p));
            if (i && edges[i - 1] >= edges[i])
                throw IoError(path + ": unsorted adjacency on vertex " + std::to_string(p));
        }
    }

    std::uint64_t exact_count = 0;
    read_pod(in, exact_count, path);
    if (exact_count != flagged)
        throw IoError(path + ": exact-list count disagrees with vertex flags");
    g.exact_lists.resize(static_cast<std::size_t>(exact_count));
    ObjectId prev_id = 0;
    for (std::size_t i = 0; i < g.exact_lists.size(); ++i) {
        auto& [id, list] = g.exact_lists[i];
        read_pod(in, id, path);
        if (id >= n || !g.has_exact[id] || (i && id <= prev_id))
            throw IoError(path + ": corrupt exact-list ids");
        prev_id = id;
        std::uint32_t len = 0;
        read_pod(in, len, path);
        if (len == 0) throw IoError(path + ": empty exact list for vertex " + std::to_string(id));
        list.capacity = len;
        list.entries.resize(len);
        for (std::uint32_t j = 0; j < len; ++j) {
            read_pod(in, list.entries[j].dist, path);
            read_pod(in, list.entries[j].id, path);
            if (list.entries[j].id >= n || list.entries[j].id == id)
                throw IoError(path + ": corrupt exact list for vertex " + std::to_string(id));
            if (j && list.entries[j].dist < list.entries[j - 1].dist)
                throw IoError(path + ": unsorted exact list for vertex " + std::to_string(id));
        }
    }
    char extra = 0;
    if (in.read(&extra, 1) && in.gcount() == 1)
        throw IoError(path + ": trailing bytes after graph payload");
    return file;
}

std::vector<double> gen_gaussian_mixture(const GenParams& params) {
    if (params.n == 0 || params.dim == 0 || params.clusters == 0)
        throw ConfigError("generator needs n, dim and clusters all positive");
    if (params.outliers > params.n)
        throw ConfigError("more planted outliers than points");
    if (!(params.stddev > 0.0)) throw ConfigError("stddev must be positive");

    Rng rng(derive_seed(params.seed, 0x67656e67ULL));
    std::vector<double> centers(params.clusters * params.dim);
    for (double& c : centers) c = uniform_real(rng, 0.0, 1.0);

    std::vector<double> flat;
    flat.reserve(params.n * params.dim);
    std::normal_distribution<double> noise(0.0, params.stddev);
    const std::size_t inliers = params.n - params.outliers;
    for (std::size_t i = 0; i < inliers; ++i) {
        const std::size_t c = uniform_index(rng, params.clusters);
        for (std::size_t d = 0; d < params.dim; ++d)
            flat.push_back(centers[c * params.dim + d] + noise(rng));
    }
    // planted points live in the shell around the unit cube: at least one
    // coordinate 0.1 beyond it, hence at least 0.1 from every center
    for (std::size_t i = 0; i < params.outliers; ++i) {
        while (true) {
            std::vector<double> candidate(params.dim);
            bool in_shell = false;
            for (std::size_t d = 0; d < params.dim; ++d) {
                candidate[d] = uniform_real(rng, -0.5, 1.5);
                in_shell = in_shell || candidate[d] < -0.1 || candidate[d] > 1.1;
            }
            if (!in_shell) continue;
            flat.insert(flat.end(), candidate.begin(), candidate.end());
            break;
        }
    }
    return flat;
}

std::vector<std::string> gen_words(std::size_t n, std::size_t outliers, std::uint64_t seed) {
    if (outliers > n) throw ConfigError("more planted outliers than points");
    Rng rng(derive_seed(seed, 0x67656e77ULL));
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n - outliers; ++i) {
        std::string w;
        const std::size_t len = 5 + uniform_index(rng, 4);
        for (std::size_t j = 0; j < len; ++j)
            w.push_back(static_cast<char>('a' + uniform_index(rng, 4)));
        words.push_back(std::move(w));
    }
    // long words over the full alphabet: edit distance to any short word is at
    // least the length gap
    for (std::size_t i = 0; i < outliers; ++i) {
        std::string w;
        const std::size_t len = 20 + uniform_index(rng, 5);
        for (std::size_t j = 0; j < len; ++j)
            w.push_back(static_cast<char>('a' + uniform_index(rng, 26)));
        words.push_back(std::move(w));
    }
    return words;
}

}  // namespace dod
