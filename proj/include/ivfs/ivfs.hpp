#pragma once

#include "ivfs/metricspace.hpp"

#include <chrono>
#include <functional>

namespace ivfs {

struct IvfsConfig {
    std::size_t k = 1000;        // number of random subsets
    std::size_t d_tilde = 1;     // features per subset
    std::size_t n_tilde = 2;     // rows per subset
    std::size_t d0 = 1;          // features to select
    NormKind norm = NormKind::LInf;
    std::uint64_t master_seed = 0;
    Normalization normalization = Normalization::OwnMax;
    std::size_t threads = 1;     // 0 = hardware concurrency; never changes results
};

inline void validate(const IvfsConfig& cfg, std::size_t n, std::size_t d) {
    require(cfg.k >= 1, "k must be >= 1");
    require(cfg.d_tilde >= 1 && cfg.d_tilde <= d, "d_tilde must lie in [1, d]");
    require(cfg.n_tilde >= 2 && cfg.n_tilde <= n, "n_tilde must lie in [2, n]");
    require(cfg.d0 >= 1 && cfg.d0 <= d, "d0 must lie in [1, d]");
}

/// Per-feature sampling counters c_i and cumulative scores S_i.
struct ScoreTable {
    std::vector<std::size_t> counters;
    std::vector<double> cumulative;

    explicit ScoreTable(std::size_t d = 0) : counters(d, 0), cumulative(d, 0.0) {}

    void add(std::span<const std::size_t> subset, double score) {
        for (std::size_t f : subset) {
            ++counters[f];
            cumulative[f] += score;
        }
    }

    /// S_i / c_i, with never-sampled features at -infinity.
    std::vector<double> finalize() const {
        std::vector<double> out(counters.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = counters[i] == 0 ? -std::numeric_limits<double>::infinity()
                                      : cumulative[i] / static_cast<double>(counters[i]);
        return out;
    }
};

struct SelectionResult {
    FeatureSubset selected;            // canonical (sorted) form
    std::vector<std::size_t> ranking;  // all features, best first
    std::vector<double> final_scores;
    ScoreTable table;
    double elapsed_seconds = 0.0;

    /// The selected features in rank order.
    std::vector<std::size_t> selected_in_rank_order() const {
        return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(selected.size())};
    }
};

/// Top `count` of `ranking` as a canonical subset.
inline FeatureSubset top_features(std::span<const std::size_t> ranking, std::size_t count) {
    require(count <= ranking.size(), "prefix longer than ranking");
    return FeatureSubset(std::vector<std::size_t>(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(count)));
}

/// Scaling applied to D_F. With SharedMax, `reference_scale` is the raw
/// maximum of the reference matrix before it was normalized.
struct ScoreScaling {
    Normalization mode = Normalization::OwnMax;
    double reference_scale = 0.0;
};

/// -||D_ref - D_F||, where D_F is built from `rows` of X over F. The same
/// value is credited to every feature of F.
inline double score_subset(const DataMatrix& X, const FeatureSubset& F, std::span<const std::size_t> rows,
                           NormKind norm, const DistanceMatrix& D_ref, const ScoreScaling& scaling = {}) {
    require(!F.empty(), "score_subset needs a nonempty feature subset");
    require(D_ref.n() == rows.size(), "reference matrix does not match the row subset");
    auto DF = pairwise_distances(X.values, rows, F.indices());
    DF = scaling.mode == Normalization::OwnMax ? normalize_max(std::move(DF))
                                               : scale_by(std::move(DF), scaling.reference_scale);
    return -diff_norm(D_ref, DF, norm);
}

namespace detail {

struct IterationDraw {
    std::vector<std::size_t> features;  // unsorted draw order
    std::vector<std::size_t> rows;
};

inline RngHandle iteration_stream(std::uint64_t master_seed, std::size_t t) {
    return RngHandle{master_seed, stream_of("ivfs.iteration", t)};
}

inline IterationDraw draw_iteration(std::uint64_t master_seed, std::size_t t, std::size_t n, std::size_t d,
                                    const IvfsConfig& cfg, bool with_rows) {
    auto engine = iteration_stream(master_seed, t).engine();
    IterationDraw draw;
    draw.features = sample_without_replacement(d, cfg.d_tilde, engine);
    if (with_rows) draw.rows = sample_without_replacement(n, cfg.n_tilde, engine);
    return draw;
}

}  // namespace detail

/// Randomized inclusion-value selection: k random (feature subset, row
/// subset) draws, each scored against the all-feature distances on the
/// same rows. Results are bit-identical for any `cfg.threads`.
inline SelectionResult run_ivfs(const DataMatrix& X, const IvfsConfig& cfg) {
    const std::size_t n = X.n();
    const std::size_t d = X.d();
    validate(cfg, n, d);
    const auto start = std::chrono::steady_clock::now();

    // Every reference block is a row restriction of the full raw matrix.
    const DistanceMatrix full = pairwise_distances(X);

    std::vector<double> scores(cfg.k);
    parallel_for(cfg.k, cfg.threads, [&](std::size_t t) {
        auto draw = detail::draw_iteration(cfg.master_seed, t, n, d, cfg, true);
        const FeatureSubset F(std::move(draw.features));
        DistanceMatrix ref = restrict_rows(full, draw.rows);
        const double raw_max = ref.max_entry();
        ref = normalize_max(std::move(ref));
        scores[t] = score_subset(X, F, draw.rows, cfg.norm, ref, {cfg.normalization, raw_max});
    });

    // Sequential accumulation in iteration order.
    SelectionResult result;
    result.table = ScoreTable(d);
    for (std::size_t t = 0; t < cfg.k; ++t) {
        const auto draw = detail::draw_iteration(cfg.master_seed, t, n, d, cfg, false);
        result.table.add(draw.features, scores[t]);
    }
    result.final_scores = result.table.finalize();

    const auto sampled = static_cast<std::size_t>(
        std::count_if(result.table.counters.begin(), result.table.counters.end(), [](std::size_t c) { return c > 0; }));
    if (sampled < cfg.d0) {
        throw RuntimeFailure("only " + std::to_string(sampled) + " of " + std::to_string(d) +
                             " features were ever sampled but d0 = " + std::to_string(cfg.d0) + "; increase k");
    }
    result.ranking = argsort(result.final_scores, true);
    result.selected = top_features(result.ranking, cfg.d0);
    result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Binomial coefficient, saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    std::uint64_t acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        const std::uint64_t num = n - r + i;
        // acc * num / i is exact at every step; guard the multiplication.
        const std::uint64_t g = std::gcd(acc, i);
        const std::uint64_t a = acc / g;
        const std::uint64_t den = i / g;
        const std::uint64_t b = num / den;
        if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
        acc = a * b;
    }
    return acc;
}

inline constexpr std::uint64_t kMaxEnumeratedSubsets = 1'000'000;

/// Calls visit(subset) for every size-r subset of 0..d-1 in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t d, std::size_t r, Visit&& visit) {
    std::vector<std::size_t> idx(r);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        visit(std::span<const std::size_t>(idx));
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == d - r + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Exact inclusion values under an arbitrary subset score `score(FeatureSubset) -> double`,
/// by exhaustive enumeration of all size-d_tilde subsets.
inline std::vector<double> exact_inclusion_value(std::size_t d, std::size_t d_tilde,
                                                 const std::function<double(const FeatureSubset&)>& score,
                                                 std::size_t threads = 1) {
    require(d_tilde >= 1 && d_tilde <= d, "d_tilde must lie in [1, d]");
    const std::uint64_t total = binomial(d, d_tilde);
    if (total > kMaxEnumeratedSubsets) {
        throw InvalidArgument("C(" + std::to_string(d) + ", " + std::to_string(d_tilde) +
                              ") exceeds the enumeration limit of " + std::to_string(kMaxEnumeratedSubsets));
    }
    std::vector<std::size_t> flat;
    flat.reserve(total * d_tilde);
    for_each_subset(d, d_tilde, [&](std::span<const std::size_t> s) { flat.insert(flat.end(), s.begin(), s.end()); });

    std::vector<double> scores(total);
    parallel_for(total, threads, [&](std::size_t i) {
        const auto begin = flat.begin() + static_cast<std::ptrdiff_t>(i * d_tilde);
        scores[i] = score(FeatureSubset(std::vector<std::size_t>(begin, begin + static_cast<std::ptrdiff_t>(d_tilde))));
    });

    std::vector<double> iv(d, 0.0);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < d_tilde; ++j) iv[flat[i * d_tilde + j]] += scores[i];
    const auto per_feature = static_cast<double>(binomial(d - 1, d_tilde - 1));
    for (double& v : iv) v /= per_feature;
    return iv;
}

/// Exact inclusion values of the distance-norm score over all rows.
inline std::vector<double> exact_inclusion_value(const DataMatrix& X, std::size_t d_tilde, NormKind norm,
                                                 Normalization normalization = Normalization::OwnMax,
                                                 std::size_t threads = 1) {
    const auto rows = iota_indices(X.n());
    DistanceMatrix ref = pairwise_distances(X);
    const double raw_max = ref.max_entry();
    ref = normalize_max(std::move(ref));
    return exact_inclusion_value(
        X.d(), d_tilde,
        [&](const FeatureSubset& F) { return score_subset(X, F, rows, norm, ref, {normalization, raw_max}); },
        threads);
}

struct IvSpread {
    std::vector<double> mean;
    std::vector<double> sd;                 // sample standard deviation (n - 1)
    std::vector<std::size_t> observations;  // repeats in which the feature was sampled
};

/// Repeats run_ivfs and summarizes the per-feature final scores. With
/// `distinct_seeds = false` every repeat reuses cfg.master_seed.
inline IvSpread estimate_iv_spread(const DataMatrix& X, const IvfsConfig& cfg, std::size_t repeats,
                                   bool distinct_seeds = true) {
    require(repeats >= 2, "estimate_iv_spread needs at least 2 repeats");
    const std::size_t d = X.d();
    std::vector<std::vector<double>> runs(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
        IvfsConfig c = cfg;
        if (distinct_seeds) c.master_seed = splitmix64(cfg.master_seed ^ stream_of("ivfs.repeat", r));
        runs[r] = run_ivfs(X, c).final_scores;
    }
    IvSpread out{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), std::vector<std::size_t>(d, 0)};
    for (std::size_t f = 0; f < d; ++f) {
        double sum = 0.0;
        std::size_t m = 0;
        for (const auto& run : runs)
            if (std::isfinite(run[f])) {
                sum += run[f];
                ++m;
            }
        out.observations[f] = m;
        if (m == 0) {
            out.mean[f] = -std::numeric_limits<double>::infinity();
            out.sd[f] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        out.mean[f] = sum / static_cast<double>(m);
        double ss = 0.0;
        for (const auto& run : runs)
            if (std::isfinite(run[f])) ss += (run[f] - out.mean[f]) * (run[f] - out.mean[f]);
        out.sd[f] = m >= 2 ? std::sqrt(ss / static_cast<double>(m - 1)) : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace ivfs
