#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dod/detect.hpp"
#include "dod/io.hpp"
#include "dod/mrpg.hpp"
#include "dod/oracle.hpp"
#include "dod/rng.hpp"
#include "json.hpp"

using namespace dod;
using nlohmann::json;

namespace {

enum class GraphVariant { KGraph, MrpgBasic, Mrpg };

GraphVariant variant_from_name(const std::string& name) {
    if (name == "kgraph") return GraphVariant::KGraph;
    if (name == "mrpg-basic") return GraphVariant::MrpgBasic;
    if (name == "mrpg") return GraphVariant::Mrpg;
    throw ConfigError("unknown graph variant: " + name);
}

VerifyMode verify_from_name(const std::string& name) {
    if (name == "vptree") return VerifyMode::VpTree;
    if (name == "scan") return VerifyMode::LinearScan;
    if (name == "auto") return VerifyMode::Auto;
    throw ConfigError("unknown verify mode: " + name);
}

struct DataOpts {
    std::string dataset;
    std::string format = "fvecs";
    std::string metric = "l2";
};

void add_data_opts(CLI::App* cmd, DataOpts& opts) {
    cmd->add_option("--dataset", opts.dataset, "input dataset path")->required();
    cmd->add_option("--format", opts.format, "dataset format")
        ->check(CLI::IsMember({"fvecs", "csv", "words"}));
    cmd->add_option("--metric", opts.metric, "distance metric")
        ->check(CLI::IsMember({"l1", "l2", "l4", "angular", "edit"}));
}

Dataset load_from(const DataOpts& opts) {
    return load_dataset(opts.dataset, format_from_name(opts.format),
                        metric_from_name(opts.metric));
}

struct BuildOpts {
    std::string graph = "mrpg";
    std::uint32_t K = 25;
    std::uint32_t Kprime = 0;
    std::uint32_t m = 0;
    std::uint32_t repeats = 3;
    std::uint64_t seed = 1;
};

void add_build_opts(CLI::App* cmd, BuildOpts& opts) {
    cmd->add_option("--graph", opts.graph, "graph variant")
        ->check(CLI::IsMember({"kgraph", "mrpg-basic", "mrpg"}));
    cmd->add_option("--K", opts.K, "neighbor list size");
    cmd->add_option("--Kprime", opts.Kprime, "exact list depth (0 = 4K)");
    cmd->add_option("--m", opts.m, "exact-flagged object count (0 = auto)");
    cmd->add_option("--repeats", opts.repeats, "partitioning passes for seeding");
    cmd->add_option("--seed", opts.seed, "build seed");
}

Mrpg build_variant(const Dataset& ds, const BuildOpts& opts, BuildTimings* timings) {
    BuildParams params;
    params.K = opts.K;
    params.K_prime = opts.Kprime;
    params.m = opts.m;
    params.repeats = opts.repeats;
    params.seed = opts.seed;
    const GraphVariant variant = variant_from_name(opts.graph);
    if (variant == GraphVariant::KGraph) return build_kgraph(ds, params, timings);
    if (variant == GraphVariant::MrpgBasic) params.K_prime = params.K;  // exact K-NNs only
    return build_mrpg(ds, params, timings);
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("not a number in list: " + cell);
        }
    }
    return out;
}

std::vector<std::uint32_t> parse_uint_list(const std::string& csv) {
    std::vector<std::uint32_t> out;
    for (double v : parse_double_list(csv)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::uint32_t>(v)))
            throw ConfigError("not a nonnegative integer in list");
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write: " + path);
    return out;
}

int cmd_gen(const std::string& out_path, const std::string& format, std::size_t n,
            std::size_t dim, std::size_t clusters, double stddev, std::size_t outliers,
            std::uint64_t seed) {
    const FileFormat fmt = format_from_name(format);
    if (fmt == FileFormat::Words) {
        save_words(out_path, gen_words(n, outliers, seed));
    } else {
        GenParams params;
        params.n = n;
        params.dim = dim;
        params.clusters = clusters;
        params.stddev = stddev;
        params.outliers = outliers;
        params.seed = seed;
        const auto flat = gen_gaussian_mixture(params);
        if (fmt == FileFormat::Fvecs)
            save_fvecs(out_path, flat, dim);
        else
            save_csv(out_path, flat, dim);
    }
    std::cout << "wrote " << n << " objects to " << out_path << "\n";
    return 0;
}

int cmd_build(const DataOpts& data, const BuildOpts& build, const std::string& out_path) {
    const Dataset ds = load_from(data);
    BuildTimings timings;
    const Mrpg g = build_variant(ds, build, &timings);
    save_graph(out_path, g, ds.content_checksum());

    std::size_t pivots = 0, flagged = 0;
    for (char f : g.is_pivot) pivots += f != 0;
    for (char f : g.has_exact) flagged += f != 0;
    std::printf("nndescent(+):      %8.3f s\n", timings.nndescent_seconds);
    std::printf("connect-subgraphs: %8.3f s\n", timings.connect_seconds);
    std::printf("remove-detours:    %8.3f s\n", timings.detours_seconds);
    std::printf("remove-links:      %8.3f s\n", timings.links_seconds);
    std::printf("n=%zu K=%u K'=%u edges=%zu pivots=%zu exact=%zu -> %s\n", g.size(), g.K,
                g.K_prime, g.edges(), pivots, flagged, out_path.c_str());
    return 0;
}

int cmd_detect(const DataOpts& data, const std::string& graph_path, double r, std::uint32_t k,
               std::uint32_t threads, const std::string& verify, std::uint64_t seed,
               const std::string& out_path) {
    const Dataset ds = load_from(data);
    const GraphFile file = load_graph(graph_path);
    if (file.graph.size() != ds.size())
        throw MismatchError("graph holds " + std::to_string(file.graph.size()) +
                            " vertices but the dataset has " + std::to_string(ds.size()) +
                            " objects");
    if (file.dataset_checksum != ds.content_checksum())
        throw MismatchError("graph was built from different data (checksum mismatch)");

    DodParams params;
    params.r = r;
    params.k = k;
    params.threads = threads;
    params.verify_mode = verify_from_name(verify);
    params.seed = seed;

    VpTree tree;
    const VpTree* tree_ptr = nullptr;
    if (params.verify_mode != VerifyMode::LinearScan) {
        tree = build_vptree(ds, std::max<std::size_t>(2, 2 * file.graph.K),
                            derive_seed(seed, 0x76707472ULL));
        tree_ptr = &tree;
    }

    const DodResult res = detect_partitioned(ds, file.graph, tree_ptr, params);
    auto out = open_out(out_path);
    for (ObjectId id : res.outliers) out << id << '\n';
    if (!out) throw IoError("write failed: " + out_path);

    const json stats = {
        {"filter_seconds", res.filter_seconds},
        {"verify_seconds", res.verify_seconds},
        {"f", res.false_positive_count()},
        {"t", res.outlier_count()},
        {"rho", res.rho},
        {"distance_evals", res.distance_evals},
        {"threads", threads},
        {"candidates", res.candidate_count},
        {"shortcut_confirmed", res.shortcut_count},
        {"verified", res.verified_count},
    };
    std::cout << stats.dump(2) << "\n";
    return 0;
}

int cmd_oracle(const DataOpts& data, double r, std::uint32_t k, bool capped,
               const std::string& out_path) {
    const Dataset ds = load_from(data);
    const OracleReport rep = brute_force_outliers(ds, r, k, capped);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    *out << "id,neighbor_count,is_outlier\n";
    for (std::size_t p = 0; p < ds.size(); ++p) {
        const bool is_out = std::binary_search(rep.outliers.begin(), rep.outliers.end(),
                                               static_cast<ObjectId>(p));
        *out << p << ',' << rep.neighbor_counts[p] << ',' << (is_out ? 1 : 0) << '\n';
    }
    if (!*out) throw IoError("write failed: " + out_path);
    std::cerr << "scan took " << rep.seconds << " s\n";
    return 0;
}

int cmd_bench(const DataOpts& data, const BuildOpts& build, const std::string& rates_csv,
              const std::string& rs_csv, const std::string& ks_csv,
              const std::string& threads_csv, const std::string& verify,
              const std::string& out_path) {
    const Dataset full = load_from(data);
    const auto rates = parse_double_list(rates_csv);
    const auto rs = parse_double_list(rs_csv);
    const auto ks = parse_uint_list(ks_csv);
    const auto threads_list = parse_uint_list(threads_csv);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    *out << "variant,n,rate,K,r,k,threads,build_seconds,detect_seconds,filter_seconds,"
            "verify_seconds,f,t,candidates,distance_evals,rho\n";

    for (double rate : rates) {
        if (rate <= 0.0 || rate > 1.0) throw ConfigError("sampling rate must be in (0, 1]");
        const auto keep = static_cast<std::size_t>(rate * static_cast<double>(full.size()));
        if (keep < 2) throw ConfigError("sampling rate keeps too few objects");
        std::vector<ObjectId> ids(full.size());
        std::iota(ids.begin(), ids.end(), ObjectId{0});
        Rng rng(derive_seed(build.seed, 0x62656e63ULL));
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(keep);
        std::sort(ids.begin(), ids.end());
        const Dataset ds = full.subset(ids);

        BuildTimings timings;
        const auto t0 = std::chrono::steady_clock::now();
        const Mrpg g = build_variant(ds, build, &timings);
        const double build_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        VpTree tree;
        const VpTree* tree_ptr = nullptr;
        const VerifyMode mode = verify_from_name(verify);
        if (mode != VerifyMode::LinearScan) {
            tree = build_vptree(ds, std::max<std::size_t>(2, 2 * g.K),
                                derive_seed(build.seed, 0x76707472ULL));
            tree_ptr = &tree;
        }

        for (double r : rs)
            for (std::uint32_t k : ks)
                for (std::uint32_t threads : threads_list) {
                    DodParams params;
                    params.r = r;
                    params.k = k;
                    params.threads = threads;
                    params.verify_mode = mode;
                    params.seed = build.seed;
                    const DodResult res = detect_partitioned(ds, g, tree_ptr, params);
                    *out << build.graph << ',' << ds.size() << ',' << rate << ',' << build.K
                         << ',' << r << ',' << k << ',' << threads << ',' << build_seconds
                         << ',' << res.filter_seconds + res.verify_seconds << ','
                         << res.filter_seconds << ',' << res.verify_seconds << ','
                         << res.false_positive_count() << ',' << res.outlier_count() << ','
                         << res.candidate_count << ',' << res.distance_evals << ',' << res.rho
                         << '\n';
                }
    }
    if (!*out) throw IoError("write failed: " + out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact distance-based outlier detection over proximity graphs"};
    app.set_config("--config", "",
                   "key=value config file; subcommand options go under a [subcommand] "
                   "section; command-line flags win");
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_out, gen_format = "fvecs";
    std::size_t gen_n = 10000, gen_dim = 2, gen_clusters = 10, gen_outliers = 10;
    double gen_stddev = 0.01;
    std::uint64_t gen_seed = 1;
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_option("--format", gen_format, "output format")
        ->check(CLI::IsMember({"fvecs", "csv", "words"}));
    gen->add_option("--n", gen_n, "object count");
    gen->add_option("--dim", gen_dim, "dimensions (vector formats)");
    gen->add_option("--clusters", gen_clusters, "mixture component count");
    gen->add_option("--stddev", gen_stddev, "per-cluster standard deviation");
    gen->add_option("--outliers", gen_outliers, "planted outlier count");
    gen->add_option("--seed", gen_seed, "generator seed");

    auto* build = app.add_subcommand("build", "build and serialize a proximity graph");
    DataOpts build_data;
    BuildOpts build_opts;
    std::string build_out;
    add_data_opts(build, build_data);
    add_build_opts(build, build_opts);
    build->add_option("--out", build_out, "graph output path")->required();

    auto* det = app.add_subcommand("detect", "run two-phase outlier detection");
    DataOpts det_data;
    std::string det_graph, det_verify = "auto", det_out;
    double det_r = 1.0;
    std::uint32_t det_k = 1, det_threads = 1;
    std::uint64_t det_seed = 1;
    add_data_opts(det, det_data);
    det->add_option("--graph-file", det_graph, "graph file from `build`")->required();
    det->add_option("--r", det_r, "distance threshold")->required();
    det->add_option("--k", det_k, "count threshold")->required();
    det->add_option("--threads", det_threads, "worker count");
    det->add_option("--verify", det_verify, "verification mode")
        ->check(CLI::IsMember({"vptree", "scan", "auto"}));
    det->add_option("--seed", det_seed, "run seed");
    det->add_option("--out", det_out, "outlier id output path")->required();

    auto* orc = app.add_subcommand("oracle", "quadratic reference scan, CSV report");
    DataOpts orc_data;
    double orc_r = 1.0;
    std::uint32_t orc_k = 1;
    bool orc_capped = false;
    std::string orc_out;
    add_data_opts(orc, orc_data);
    orc->add_option("--r", orc_r, "distance threshold")->required();
    orc->add_option("--k", orc_k, "count threshold")->required();
    orc->add_flag("--capped", orc_capped, "stop each row at k (nested-loop baseline)");
    orc->add_option("--out", orc_out, "CSV output path (default stdout)");

    auto* bench = app.add_subcommand("bench", "sweep a parameter grid, CSV per cell");
    DataOpts bench_data;
    BuildOpts bench_opts;
    std::string bench_rates = "1.0", bench_rs = "0.1", bench_ks = "4", bench_threads = "1";
    std::string bench_verify = "auto", bench_out;
    add_data_opts(bench, bench_data);
    add_build_opts(bench, bench_opts);
    bench->add_option("--rates", bench_rates, "comma list of sampling rates");
    bench->add_option("--rs", bench_rs, "comma list of r values");
    bench->add_option("--ks", bench_ks, "comma list of k values");
    bench->add_option("--threads-list", bench_threads, "comma list of thread counts");
    bench->add_option("--verify", bench_verify, "verification mode")
        ->check(CLI::IsMember({"vptree", "scan", "auto"}));
    bench->add_option("--out", bench_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (gen->parsed())
            return cmd_gen(gen_out, gen_format, gen_n, gen_dim, gen_clusters, gen_stddev,
                           gen_outliers, gen_seed);
        if (build->parsed()) return cmd_build(build_data, build_opts, build_out);
        if (det->parsed())
            return cmd_detect(det_data, det_graph, det_r, det_k, det_threads, det_verify,
                              det_seed, det_out);
        if (orc->parsed()) return cmd_oracle(orc_data, orc_r, orc_k, orc_capped, orc_out);
        if (bench->parsed())
            return cmd_bench(bench_data, bench_opts, bench_rates, bench_rs, bench_ks,
                             bench_threads, bench_verify, bench_out);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const MismatchError& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
