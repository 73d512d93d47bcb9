#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/mrpg.hpp"
#include "dod/types.hpp"

namespace dod {

enum class FileFormat { Fvecs, Csv, Words };

const char* format_name(FileFormat f);
FileFormat format_from_name(const std::string& name);  // ConfigError on unknown

// Loaders attach the requested metric; the words format forces Edit and the
// vector formats refuse it. fvecs records must all carry the dimension of the
// first record; drift aborts with the offending byte offset.
Dataset load_dataset(const std::string& path, FileFormat format, MetricKind metric);

void save_fvecs(const std::string& path, const std::vector<double>& flat, std::size_t dim);
void save_csv(const std::string& path, const std::vector<double>& flat, std::size_t dim);
void save_words(const std::string& path, const std::vector<std::string>& words);

// Binary graph container. The header binds the dataset size and content
// checksum so a graph cannot silently be used against other data.
void save_graph(const std::string& path, const Mrpg& g, std::uint64_t dataset_checksum);

struct GraphFile {
    Mrpg graph;
    std::uint64_t dataset_checksum = 0;
};
GraphFile load_graph(const std::string& path);

struct GenParams {
    std::size_t n = 1000;
    std::size_t dim = 2;
    std::size_t clusters = 10;
    double stddev = 0.01;
    std::size_t outliers = 10;
    std::uint64_t seed = 1;
};

// Gaussian mixture over centers in the unit cube plus `outliers` points
// planted in the surrounding shell, at least 0.1 away from every center.
// Outlier ids are the last `outliers` ids.
std::vector<double> gen_gaussian_mixture(const GenParams& params);

// Short words over a 4-letter alphabet plus `outliers` long words over the
// full alphabet; long words sit far from everything in edit distance.
std::vector<std::string> gen_words(std::size_t n, std::size_t outliers, std::uint64_t seed);

}  // namespace dod
