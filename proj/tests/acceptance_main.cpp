// Release gate: one line per criterion, nonzero exit when any line fails.
// Progress chatter goes to stderr so stdout stays a clean 9-line report.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "dod/dataset.hpp"
#include "dod/detect.hpp"
#include "dod/io.hpp"
#include "dod/mrpg.hpp"
#include "dod/nndescent.hpp"
#include "dod/oracle.hpp"
#include "dod/rng.hpp"
#include "dod/vptree.hpp"

using namespace dod;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

Dataset make_vectors(const GenParams& gp, MetricKind metric) {
    return Dataset::from_vectors(gen_gaussian_mixture(gp), gp.dim, metric);
}

// Exact k-th nearest neighbor distance of every object, parallel over rows.
std::vector<double> exact_kth_dists(const Dataset& ds, std::uint32_t k) {
    const std::size_t n = ds.size();
    std::vector<double> out(n, 0.0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) {
        std::priority_queue<double> worst;  // max-heap of the k best distances
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = ds.distance(static_cast<ObjectId>(i), static_cast<ObjectId>(j));
            if (worst.size() < k)
                worst.push(d);
            else if (d < worst.top()) {
                worst.pop();
                worst.push(d);
            }
        }
        out[i] = worst.empty() ? 0.0 : worst.top();
    }
    return out;
}

// Radius whose outlier ratio (fraction of objects with k-th NN beyond it)
// lands near `ratio` for this dataset and k.
double radius_from_kth(std::vector<double> kth, double ratio) {
    std::sort(kth.begin(), kth.end());
    const auto idx = static_cast<std::size_t>((1.0 - ratio) * (kth.size() - 1));
    return kth[std::min(idx, kth.size() - 1)];
}

// Same quantile estimated from `samples` full rows instead of all of them.
double sampled_radius(const Dataset& ds, std::uint32_t k, double ratio, std::size_t samples,
                      std::uint64_t seed) {
    const std::size_t n = ds.size();
    samples = std::min(samples, n);
    std::vector<ObjectId> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    Rng rng(derive_seed(seed, 0x72616469ULL));
    for (std::size_t i = 0; i < samples; ++i)
        std::swap(ids[i], ids[i + uniform_index(rng, n - i)]);
    std::vector<double> kth(samples, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t s = 0; s < samples; ++s) {
        std::priority_queue<double> worst;
        for (std::size_t j = 0; j < n; ++j) {
            if (ids[s] == static_cast<ObjectId>(j)) continue;
            const double d = ds.distance(ids[s], static_cast<ObjectId>(j));
            if (worst.size() < k)
                worst.push(d);
            else if (d < worst.top()) {
                worst.pop();
                worst.push(d);
            }
        }
        kth[s] = worst.top();
    }
    return radius_from_kth(std::move(kth), ratio);
}

// Least-squares slope of ln(t) against ln(n).
double fit_exponent(const std::vector<double>& ns, const std::vector<double>& ts) {
    const std::size_t m = ns.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += std::log(ns[i]);
        my += std::log(ts[i]);
    }
    mx /= m;
    my /= m;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = std::log(ns[i]) - mx;
        num += dx * (std::log(ts[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

bool connected_and_bounded(const Mrpg& g) {
    const std::size_t n = g.size();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<ObjectId> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const ObjectId v = queue.back();
        queue.pop_back();
        for (ObjectId w : g.adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                queue.push_back(w);
            }
    }
    return reached == n && g.edges() <= static_cast<std::size_t>(8.0 * n * g.K);
}

template <class F>
double min_of(int reps, F&& body) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now_seconds();
        body();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

struct Line {
    bool pass = false;
    std::string text;
};

// Criteria 1, 2 and the first batch of criterion 5 share one instance sweep.
struct ExactnessOutcome {
    int mismatches = 0;
    int fn_violations = 0;
    int variant_runs = 0;
    int c5_checked = 0;
    int c5_violations = 0;
    double min_ratio = 1.0, max_ratio = 0.0;
    double seconds = 0.0;
};

ExactnessOutcome run_exactness_sweep() {
    ExactnessOutcome out;
    const double t0 = now_seconds();
    const std::size_t sizes[3] = {500, 2000, 5000};
    const MetricKind metrics[4] = {MetricKind::L1, MetricKind::L2, MetricKind::Angular,
                                   MetricKind::Edit};
    for (int i = 0; i < 30; ++i) {
        const std::size_t n = sizes[i % 3];
        const MetricKind metric = metrics[i % 4];
        Rng rng(derive_seed(0xACCE5501ULL, static_cast<std::uint64_t>(i)));
        const auto k = static_cast<std::uint32_t>(2 + uniform_index(rng, 11));
        const double ratio =
            std::exp(std::log(0.001) + uniform_real(rng, 0.0, 1.0) * std::log(100.0));

        Dataset ds = metric == MetricKind::Edit
                         ? Dataset::from_strings(gen_words(n, std::max<std::size_t>(n / 200, 2),
                                                           1000 + i))
                         : make_vectors({n, 2 + 2 * (static_cast<std::size_t>(i) % 4),
                                         4 + (static_cast<std::size_t>(i) % 5), 0.02,
                                         std::max<std::size_t>(n / 200, 2),
                                         static_cast<std::uint64_t>(1000 + i)},
                                        metric);

        const double r = radius_from_kth(exact_kth_dists(ds, k), ratio);
        const OracleReport truth = brute_force_outliers(ds, r, k);
        const double realized = static_cast<double>(truth.outliers.size()) / n;
        out.min_ratio = std::min(out.min_ratio, realized);
        out.max_ratio = std::max(out.max_ratio, realized);

        BuildParams bp;
        bp.K = 10;
        bp.seed = 500 + i;
        const VpTree tree = build_vptree(ds, 2 * bp.K, derive_seed(bp.seed, 0x76707472ULL));
        for (int variant = 0; variant < 3; ++variant) {
            BuildParams vb = bp;
            if (variant == 1) vb.K_prime = vb.K;  // mrpg-basic
            Mrpg g;
            try {
                g = variant == 0 ? build_kgraph(ds, vb) : build_mrpg(ds, vb);
            } catch (const MismatchError&) {
                ++out.c5_checked;
                ++out.c5_violations;
                ++out.mismatches;
                continue;
            }
            if (variant != 0) {
                ++out.c5_checked;
                if (!connected_and_bounded(g)) ++out.c5_violations;
            }
            DodParams dp;
            dp.r = r;
            dp.k = k;
            dp.threads = 2;
            const DodResult res = detect_partitioned(ds, g, &tree, dp);
            ++out.variant_runs;
            if (res.outliers != truth.outliers) ++out.mismatches;
            if (!std::includes(res.candidates.begin(), res.candidates.end(),
                               truth.outliers.begin(), truth.outliers.end()))
                ++out.fn_violations;
        }
        std::fprintf(stderr, "  exactness sweep %d/30 (n=%zu metric=%s k=%u ratio=%.3f)\n",
                     i + 1, n, metric_name(metric), k, realized);
    }
    out.seconds = now_seconds() - t0;
    return out;
}

// Mixed-density instance: tight clusters, diffuse clusters, and a uniform
// noise floor. Borderline neighborhoods then straddle density boundaries,
// which is the regime where filter quality separates the graph variants.
Dataset make_mixed_density(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x6d697864ULL));
    const std::size_t n_dense = n * 70 / 100, n_sparse = n * 25 / 100;
    std::vector<double> dense_centers(10 * dim), sparse_centers(5 * dim);
    for (double& c : dense_centers) c = uniform_real(rng, 0.0, 1.0);
    for (double& c : sparse_centers) c = uniform_real(rng, 0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> flat;
    flat.reserve(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_dense) {
            const std::size_t c = uniform_index(rng, 10);
            for (std::size_t d = 0; d < dim; ++d)
                flat.push_back(dense_centers[c * dim + d] + 0.05 * gauss(rng));
        } else if (i < n_dense + n_sparse) {
            const std::size_t c = uniform_index(rng, 5);
            for (std::size_t d = 0; d < dim; ++d)
                flat.push_back(sparse_centers[c * dim + d] + 0.15 * gauss(rng));
        } else {
            for (std::size_t d = 0; d < dim; ++d) flat.push_back(uniform_real(rng, 0.0, 1.0));
        }
    }
    return Dataset::from_vectors(std::move(flat), dim, MetricKind::L2);
}

// Criteria 3 and 4 plus the second batch of criterion 5.
struct OrderingOutcome {
    int ordered = 0;
    int instances = 0;
    double sum_f_mrpg = 0.0, sum_f_kgraph = 0.0;
    int c4_violations = 0;
    int c5_checked = 0;
    int c5_violations = 0;
    double seconds = 0.0;
};

OrderingOutcome run_ordering_sweep() {
    OrderingOutcome out;
    const double t0 = now_seconds();
    for (int i = 0; i < 10; ++i) {
        const Dataset ds = make_mixed_density(20000, 8, 3000 + i);
        // k above the graph degree K: raw K-NN adjacency can no longer answer
        // from a vertex's own list, which is where the variants separate
        const auto k = static_cast<std::uint32_t>(15 + 5 * (i % 6));
        const double r = sampled_radius(ds, k, 0.02, 400, 3000 + i);

        BuildParams bp;
        bp.K = 10;
        bp.seed = 700 + i;
        const VpTree tree = build_vptree(ds, 2 * bp.K, derive_seed(bp.seed, 0x76707472ULL));
        std::size_t f[3] = {0, 0, 0}, verified[3] = {0, 0, 0};
        for (int variant = 0; variant < 3; ++variant) {
            BuildParams vb = bp;
            if (variant == 1) vb.K_prime = vb.K;
            const Mrpg g = variant == 0 ? build_kgraph(ds, vb) : build_mrpg(ds, vb);
            if (variant != 0) {
                ++out.c5_checked;
                if (!connected_and_bounded(g)) ++out.c5_violations;
            }
            DodParams dp;
            dp.r = r;
            dp.k = k;
            dp.threads = 2;
            const DodResult res = detect_partitioned(ds, g, &tree, dp);
            f[variant] = res.false_positive_count();
            verified[variant] = res.verified_count;
        }
        ++out.instances;
        if (f[2] <= f[1] && f[1] <= f[0]) ++out.ordered;
        out.sum_f_mrpg += static_cast<double>(f[2]);
        out.sum_f_kgraph += static_cast<double>(f[0]);
        if (verified[2] > verified[1]) ++out.c4_violations;
        std::fprintf(stderr,
                     "  ordering sweep %d/10 (k=%u r=%.4f f: kgraph=%zu basic=%zu mrpg=%zu "
                     "verified: basic=%zu mrpg=%zu)\n",
                     i + 1, k, r, f[0], f[1], f[2], verified[1], verified[2]);
    }
    out.seconds = now_seconds() - t0;
    return out;
}

Line criterion_6() {
    int msg_failures = 0;
    int strict = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        GenParams gp;
        gp.n = 400;
        gp.dim = 2;
        gp.clusters = 8;
        gp.stddev = 0.02;
        gp.outliers = 4;
        gp.seed = 4000 + s;
        const Dataset ds = make_vectors(gp, MetricKind::L2);
        BuildParams bp;
        bp.K = 6;
        bp.seed = 40 + s;
        const NnPlusOutput plus = nndescent_plus(ds, bp);
        const Adjacency base = symmetrize(plus.graph);

        if (s < 3) {  // all-ordered-pairs audit is quadratic; three seeds suffice
            const Adjacency msg = build_msg_oracle(ds, base);
            for (ObjectId p = 0; p < ds.size() && msg_failures == 0; ++p)
                for (ObjectId q = 0; q < ds.size(); ++q)
                    if (p != q && !monotone_reachability(msg, ds, p, q)) {
                        ++msg_failures;
                        break;
                    }
        }

        std::vector<char> exact_mask(ds.size(), 0);
        for (ObjectId id : plus.exact_flagged) exact_mask[id] = 1;
        Adjacency refined = base;
        connect_subgraphs(refined, ds, plus.pivots, bp.V_piv_size, bp.max_hops,
                          derive_seed(bp.seed, 0x434f4e4eULL));
        remove_detours(refined, ds, plus.pivots, exact_mask, bp.resolved_sample_size(ds.size()),
                       bp.resolved_pivot_sample_size(), bp.resolved_cap(),
                       derive_seed(bp.seed, 0x44455455ULL));
        const double before = monotone_path_density(base, ds, 1e9, 4000, 77);
        const double after = monotone_path_density(refined, ds, 1e9, 4000, 77);
        if (after > before) ++strict;
        std::fprintf(stderr, "  msg/density seed %d/10 (density %.4f -> %.4f)\n", s + 1, before,
                     after);
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "criterion 6: msg oracle monotone-complete on 3/3 audited builds (%d failures); "
                  "detour removal raised monotone density in %d/%d seeds",
                  msg_failures, strict, seeds);
    return {msg_failures == 0 && strict >= 9, buf};
}

Line criterion_7() {
    GenParams gp;
    gp.n = 2000;
    gp.dim = 4;
    gp.clusters = 1;
    gp.stddev = 0.25;
    gp.outliers = 0;
    gp.seed = 0xC7;
    const Dataset ds = make_vectors(gp, MetricKind::L2);
    BuildParams bp;
    bp.K = 10;
    bp.seed = 7;
    const NnPlusOutput plus = nndescent_plus(ds, bp);

    double hits = 0.0;
    for (ObjectId p = 0; p < ds.size(); ++p) {
        const NeighborList truth = exact_knn(ds, p, bp.K);
        const auto& approx = plus.graph.lists[p].entries;
        const std::size_t top = std::min<std::size_t>(bp.K, approx.size());
        for (std::size_t a = 0; a < top; ++a)
            if (truth.contains(approx[a].id)) hits += 1.0;
    }
    const double recall = hits / (static_cast<double>(ds.size()) * bp.K);

    int list_mismatches = 0;
    for (ObjectId p : plus.exact_flagged)
        if (plus.graph.lists[p].entries != exact_knn(ds, p, bp.resolved_K_prime()).entries)
            ++list_mismatches;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "criterion 7: aknn recall@%u %.4f (need >= 0.90); %zu flagged K'-NN lists "
                  "exact with %d mismatches",
                  bp.K, recall, plus.exact_flagged.size(), list_mismatches);
    return {recall >= 0.90 && list_mismatches == 0, buf};
}

struct ScalingArtifacts {
    std::optional<Dataset> ds;  // largest instance, reused by criterion 9
    Mrpg graph;
    VpTree tree;
    DodParams params;
};

Line criterion_8(ScalingArtifacts& keep) {
    const std::vector<double> ns = {10000, 20000, 40000, 80000};
    const std::uint32_t k = 10;
    const std::size_t count = ns.size();

    // build every instance first, then time in interleaved rounds: a load
    // spike on a shared host hits one round, not one end of the size grid,
    // and the per-size minimum recovers the quiet-machine figure
    std::vector<Dataset> held;
    held.reserve(count - 1);  // reallocation would move datasets under their trees
    std::vector<Mrpg> graphs(count);
    std::vector<VpTree> trees;
    trees.reserve(count);
    std::vector<DodParams> dps(count);
    std::vector<double> build_t(count);

    for (std::size_t idx = 0; idx < count; ++idx) {
        const auto n = static_cast<std::size_t>(ns[idx]);
        GenParams gp;
        gp.n = n;
        gp.dim = 4;
        gp.clusters = n / 1000;  // constant cluster mass keeps the nested loop quadratic
        gp.stddev = 0.015;
        gp.outliers = n / 1000;
        gp.seed = 9000 + idx;
        Dataset built = make_vectors(gp, MetricKind::L2);
        const bool last = idx + 1 == count;
        // the trees store pointers to their datasets, so each dataset must
        // reach its final home before its tree is built
        if (last)
            keep.ds.emplace(std::move(built));
        else
            held.push_back(std::move(built));
        const Dataset& ds = last ? *keep.ds : held.back();
        // calibrating r per instance pins the candidate fraction at every n;
        // a radius carried over from the smallest instance drifts as cluster
        // centers crowd the cube and blurs the exponent being measured
        const double r = sampled_radius(ds, k, 0.01, 1000, 11 + idx);

        BuildParams bp;
        bp.K = 10;
        bp.seed = 42;
        const double b0 = now_seconds();
        graphs[idx] = build_mrpg(ds, bp);
        build_t[idx] = now_seconds() - b0;
        trees.push_back(build_vptree(ds, 2 * bp.K, derive_seed(bp.seed, 0x76707472ULL)));

        dps[idx].r = r;
        dps[idx].k = k;
        dps[idx].threads = 1;
    }

    auto dataset_at = [&](std::size_t idx) -> const Dataset& {
        return idx + 1 == count ? *keep.ds : held[idx];
    };
    // second build-timing pass, separated in time from the first; the build
    // is deterministic so the rebuilt graph is discarded
    for (std::size_t idx = 0; idx < count; ++idx) {
        BuildParams bp;
        bp.K = 10;
        bp.seed = 42;
        const double b0 = now_seconds();
        (void)build_mrpg(dataset_at(idx), bp);
        build_t[idx] = std::min(build_t[idx], now_seconds() - b0);
    }
    for (std::size_t idx = 0; idx < count; ++idx)  // warm caches before timing
        (void)detect_partitioned(dataset_at(idx), graphs[idx], &trees[idx], dps[idx]);

    std::vector<double> detect_t(count, 1e30), oracle_t(count, 1e30);
    for (int round = 0; round < 3; ++round) {
        for (std::size_t idx = 0; idx < count; ++idx) {
            const Dataset& ds = dataset_at(idx);
            detect_t[idx] = std::min(detect_t[idx], min_of(3, [&] {
                                         (void)detect_partitioned(ds, graphs[idx], &trees[idx],
                                                                  dps[idx]);
                                     }));
            oracle_t[idx] = std::min(
                oracle_t[idx], min_of(1, [&] { (void)brute_force_outliers(ds, dps[idx].r, k, true); }));
        }
    }
    // keep sampling detect until the minima stop improving: a sustained load
    // episode on a shared host would otherwise be recorded as the machine's
    // speed, and the short sleeps stretch the window it must outlast
    for (int round = 0, stable = 0; round < 16 && stable < 2; ++round) {
        bool improved = false;
        for (std::size_t idx = 0; idx < count; ++idx) {
            const double t = min_of(2, [&] {
                (void)detect_partitioned(dataset_at(idx), graphs[idx], &trees[idx], dps[idx]);
            });
            if (t < 0.98 * detect_t[idx]) improved = true;
            detect_t[idx] = std::min(detect_t[idx], t);
        }
        stable = improved ? 0 : stable + 1;
        if (improved) std::this_thread::sleep_for(std::chrono::milliseconds(500));
    }
    for (std::size_t idx = 0; idx < count; ++idx)
        std::fprintf(stderr, "  scaling n=%.0f build=%.2fs detect=%.4fs nested-loop=%.3fs\n",
                     ns[idx], build_t[idx], detect_t[idx], oracle_t[idx]);

    keep.graph = std::move(graphs.back());
    keep.tree = std::move(trees.back());
    keep.params = dps.back();

    const double e_detect = fit_exponent(ns, detect_t);
    const double e_oracle = fit_exponent(ns, oracle_t);
    const double e_build = fit_exponent(ns, build_t);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "criterion 8: power-law exponents detect %.2f (need <= 1.3), nested-loop %.2f "
                  "(need >= 1.8), build %.2f",
                  e_detect, e_oracle, e_build);
    return {e_detect <= 1.3 && e_oracle >= 1.8, buf};
}

Line criterion_9(ScalingArtifacts& art) {
    DodParams dp = art.params;
    std::vector<ObjectId> sets[3];
    double times[3] = {0, 0, 0};
    const std::uint32_t thread_counts[3] = {1, 2, 4};
    for (int i = 0; i < 3; ++i) {
        dp.threads = thread_counts[i];
        times[i] = min_of(i == 1 ? 1 : 3, [&] {
            sets[i] = detect_partitioned(*art.ds, art.graph, &art.tree, dp).outliers;
        });
    }
    const bool identical = sets[0] == sets[1] && sets[1] == sets[2];
    const double speedup = times[0] / times[2];
    int visible = static_cast<int>(std::thread::hardware_concurrency());
#ifdef _OPENMP
    visible = omp_get_max_threads();
#endif
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "criterion 9: 4-thread speedup %.2fx on n=80000 (need >= 2.0x, %d hardware "
                  "threads visible); outlier sets %s across {1,2,4} threads",
                  speedup, visible, identical ? "identical" : "DIFFER");
    return {speedup >= 2.0 && identical, buf};
}

}  // namespace

int main(int argc, char** argv) {
    // Optional argv[1]: comma list of criterion numbers to run (dev shortcut);
    // the registered test always runs all nine.
    bool want[10];
    std::fill(std::begin(want), std::end(want), argc < 2);
    if (argc >= 2)
        for (const char* p = argv[1]; *p; ++p)
            if (*p >= '1' && *p <= '9') want[*p - '0'] = true;
    if (want[9]) want[8] = true;  // thread scaling reuses the 80k artifacts

    std::vector<Line> lines;
    char buf[256];

    ExactnessOutcome ex;
    if (want[1] || want[2] || want[5]) {
        std::fprintf(stderr, "exactness sweep (criteria 1, 2, 5)...\n");
        ex = run_exactness_sweep();
    }
    std::snprintf(buf, sizeof buf,
                  "criterion 1: exact outlier sets on %d variant runs over 30 instances "
                  "(%d mismatches; outlier ratios %.2f%%-%.2f%%; %.0fs, budget 300s)",
                  ex.variant_runs, ex.mismatches, 100.0 * ex.min_ratio, 100.0 * ex.max_ratio,
                  ex.seconds);
    if (want[1]) lines.push_back({ex.mismatches == 0 && ex.seconds < 300.0, buf});
    std::snprintf(buf, sizeof buf,
                  "criterion 2: no false negatives (%d violations on %d variant runs)",
                  ex.fn_violations, ex.variant_runs);
    if (want[2]) lines.push_back({ex.fn_violations == 0, buf});

    OrderingOutcome ord;
    if (want[3] || want[4] || want[5]) {
        std::fprintf(stderr, "ordering sweep (criteria 3, 4, 5)...\n");
        ord = run_ordering_sweep();
    }
    std::snprintf(buf, sizeof buf,
                  "criterion 3: f(mrpg) <= f(basic) <= f(kgraph) in %d/%d instances "
                  "(need >= 8), mean f %.1f vs %.1f (%.0fs, budget 900s)",
                  ord.ordered, std::max(ord.instances, 1), ord.sum_f_mrpg / std::max(ord.instances, 1),
                  ord.sum_f_kgraph / std::max(ord.instances, 1), ord.seconds);
    if (want[3])
        lines.push_back({ord.ordered >= 8 && ord.sum_f_mrpg < ord.sum_f_kgraph &&
                             ord.seconds < 900.0,
                         buf});
    std::snprintf(buf, sizeof buf,
                  "criterion 4: mrpg verification count <= mrpg-basic in every instance "
                  "(%d violations of %d)",
                  ord.c4_violations, ord.instances);
    if (want[4]) lines.push_back({ord.c4_violations == 0, buf});

    std::snprintf(buf, sizeof buf,
                  "criterion 5: every refined graph connected with edges <= 8nK "
                  "(%d violations on %d builds)",
                  ex.c5_violations + ord.c5_violations, ex.c5_checked + ord.c5_checked);
    if (want[5]) lines.push_back({ex.c5_violations + ord.c5_violations == 0, buf});

    if (want[6]) {
        std::fprintf(stderr, "msg oracle and density (criterion 6)...\n");
        lines.push_back(criterion_6());
    }
    if (want[7]) {
        std::fprintf(stderr, "aknn quality (criterion 7)...\n");
        lines.push_back(criterion_7());
    }
    ScalingArtifacts artifacts;
    if (want[8]) {
        std::fprintf(stderr, "scaling shape (criterion 8)...\n");
        lines.push_back(criterion_8(artifacts));
    }
    if (want[9]) {
        std::fprintf(stderr, "thread scaling (criterion 9)...\n");
        lines.push_back(criterion_9(artifacts));
    }

    int failures = 0;
    for (const Line& line : lines) {
        std::printf("[%s] %s\n", line.pass ? "PASS" : "FAIL", line.text.c_str());
        if (!line.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
