#pragma once

#include "ivfs/baselines.hpp"
#include "ivfs/evaluation.hpp"
#include "ivfs/ivfs.hpp"

#include <charconv>

namespace ivfs {

enum class Method { IvfsLinf, IvfsL1, IvfsL2, Spec, Mcfs };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::IvfsLinf: return "ivfs-linf";
        case Method::IvfsL1: return "ivfs-l1";
        case Method::IvfsL2: return "ivfs-l2";
        case Method::Spec: return "spec";
        case Method::Mcfs: return "mcfs";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    for (Method m : {Method::IvfsLinf, Method::IvfsL1, Method::IvfsL2, Method::Spec, Method::Mcfs})
        if (s == to_string(m)) return m;
    throw InvalidArgument("unknown method '" + std::string(s) + "' (expected ivfs-linf, ivfs-l1, ivfs-l2, spec or mcfs)");
}

inline bool is_ivfs(Method m) { return m == Method::IvfsLinf || m == Method::IvfsL1 || m == Method::IvfsL2; }

inline NormKind norm_of(Method m) {
    switch (m) {
        case Method::IvfsL1: return NormKind::L1;
        case Method::IvfsL2: return NormKind::L2;
        default: return NormKind::LInf;
    }
}

/// A count given as a fraction of a total ("0.3") or absolutely ("abs:100").
/// Fractions round half up and never fall below 1; absolute counts are
/// capped at the total.
struct CountSpec {
    double fraction = 0.0;
    std::size_t absolute = 0;
    bool is_absolute = false;

    static CountSpec parse(std::string_view s) {
        CountSpec c;
        if (s.rfind("abs:", 0) == 0) {
            s.remove_prefix(4);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), c.absolute);
            require(ec == std::errc{} && ptr == s.data() + s.size() && c.absolute >= 1,
                    "invalid absolute count 'abs:" + std::string(s) + "'");
            c.is_absolute = true;
            return c;
        }
        const auto v = detail::parse_real(s);
        require(v && *v > 0.0 && *v <= 1.0, "expected a fraction in (0, 1] or abs:<count>, got '" + std::string(s) + "'");
        c.fraction = *v;
        return c;
    }

    std::size_t resolve(std::size_t total) const {
        if (is_absolute) return std::min(absolute, total);
        const auto v = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 0.5));
        return std::clamp<std::size_t>(v, 1, total);
    }

    std::string str() const {
        if (is_absolute) return "abs:" + std::to_string(absolute);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", fraction);
        return buf;
    }
};

struct MethodOptions {
    Method method = Method::IvfsLinf;
    std::size_t k = 1000;
    CountSpec d_tilde = CountSpec::parse("0.3");
    CountSpec n_tilde = CountSpec::parse("0.1");
    Normalization normalization = Normalization::OwnMax;
    GraphKind spec_graph = GraphKind::RbfFull;
    GraphKind mcfs_graph = GraphKind::KnnBinary;
    std::size_t k_neighbors = 5;
    std::size_t clusters = 5;  // MCFS M
    std::size_t threads = 1;
};

struct MethodRun {
    std::vector<std::size_t> ranking;  // all features, best first
    std::vector<double> scores;
    double elapsed_seconds = 0.0;
    std::map<std::string, std::string> parameters;  // resolved settings

    std::vector<std::size_t> top(std::size_t count) const {
        require(count <= ranking.size(), "requested more features than were ranked");
        return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(count)};
    }
};

inline IvfsConfig resolve_ivfs_config(const DataMatrix& X, const MethodOptions& opt, std::size_t d0, std::uint64_t seed) {
    IvfsConfig cfg;
    cfg.k = opt.k;
    cfg.d_tilde = opt.d_tilde.resolve(X.d());
    cfg.n_tilde = std::max<std::size_t>(2, opt.n_tilde.resolve(X.n()));
    cfg.d0 = d0;
    cfg.norm = norm_of(opt.method);
    cfg.master_seed = seed;
    cfg.normalization = opt.normalization;
    cfg.threads = opt.threads;
    return cfg;
}

/// Runs one selector and returns its full ranking. `d0` is the selection
/// size (it also sets the MCFS regression support).
inline MethodRun run_method(const DataMatrix& X, const MethodOptions& opt, std::size_t d0, std::uint64_t seed) {
    require(d0 >= 1 && d0 <= X.d(), "d0 must lie in [1, d] (d = " + std::to_string(X.d()) + ")");
    MethodRun run;
    run.parameters["method"] = to_string(opt.method);
    run.parameters["d0"] = std::to_string(d0);
    if (is_ivfs(opt.method)) {
        const auto cfg = resolve_ivfs_config(X, opt, d0, seed);
        const auto res = run_ivfs(X, cfg);
        run.ranking = res.ranking;
        run.scores = res.final_scores;
        run.elapsed_seconds = res.elapsed_seconds;
        run.parameters["k"] = std::to_string(cfg.k);
        run.parameters["d_tilde"] = std::to_string(cfg.d_tilde);
        run.parameters["d_tilde_spec"] = opt.d_tilde.str();
        run.parameters["n_tilde"] = std::to_string(cfg.n_tilde);
        run.parameters["n_tilde_spec"] = opt.n_tilde.str();
        run.parameters["norm"] = to_string(cfg.norm);
        run.parameters["normalization"] = to_string(cfg.normalization);
        return run;
    }
    const bool spec = opt.method == Method::Spec;
    const GraphKind kind = spec ? opt.spec_graph : opt.mcfs_graph;
    auto [ranking, seconds] = timed([&] {
        const auto graph = build_similarity(X, kind, opt.k_neighbors);
        return spec ? spec_rank(X, graph) : mcfs_rank(X, graph, opt.clusters, d0, opt.threads);
    });
    run.ranking = std::move(ranking.order);
    run.scores = std::move(ranking.scores);
    run.elapsed_seconds = seconds;
    run.parameters["graph"] = to_string(kind);
    if (kind == GraphKind::KnnBinary) run.parameters["k_neighbors"] = std::to_string(opt.k_neighbors);
    if (!spec) run.parameters["clusters"] = std::to_string(opt.clusters);
    return run;
}

// ---------------------------------------------------------------------------
// Prefix sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    std::string method;
    std::size_t n_features = 0;
    std::string metric;
    double value = 0.0;
};

/// Evaluates the top-m prefix of `ranking` for m = start, start+step, ..., <= stop.
inline std::vector<SweepRow> sweep_prefixes(const DataMatrix& X, const std::string& method,
                                            std::span<const std::size_t> ranking, std::size_t start, std::size_t stop,
                                            std::size_t step, const EvaluationConfig& cfg) {
    require(step >= 1, "step must be >= 1");
    require(start >= 1 && start <= stop && stop <= ranking.size(), "sweep range must satisfy 1 <= start <= stop <= d");
    std::vector<std::size_t> counts;
    for (std::size_t m = start; m <= stop; m += step) counts.push_back(m);
    std::vector<EvaluationReport> reports(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) reports[i] = evaluate_selection(X, top_features(ranking, counts[i]), cfg);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (const auto& name : metric_names())
            if (cfg.wants(name)) rows.push_back({method, counts[i], name, reports[i].get(name)});
    return rows;
}

// ---------------------------------------------------------------------------
// Bootstrap stability
// ---------------------------------------------------------------------------

enum class Resample { Bootstrap, Identity };

inline Resample parse_resample(std::string_view s) {
    if (s == "bootstrap") return Resample::Bootstrap;
    if (s == "identity") return Resample::Identity;
    throw InvalidArgument("unknown resample mode '" + std::string(s) + "' (expected bootstrap or identity)");
}

inline std::size_t selection_difference(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    std::vector<std::size_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<std::size_t> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    return sa.size() - common.size();
}

struct StabilityOptions {
    std::size_t reps = 5;
    double ratio = 0.8;
    Resample resample = Resample::Bootstrap;
    bool same_seed = false;  // reuse the original arm's seed on every resample
};

/// Mean of d0 - |A ∩ B| between the selection on X and on each resample of X.
inline double stability_difference(const DataMatrix& X, const MethodOptions& opt, std::size_t d0, std::uint64_t seed,
                                   const StabilityOptions& sopt) {
    require(sopt.reps >= 1, "repetitions must be >= 1");
    const auto original = run_method(X, opt, d0, seed).top(d0);
    double total = 0.0;
    for (std::size_t r = 0; r < sopt.reps; ++r) {
        const RngHandle rh{seed, stream_of("stability.resample", r)};
        const DataMatrix Xb = sopt.resample == Resample::Bootstrap ? bootstrap(X, sopt.ratio, rh) : X;
        const std::uint64_t arm_seed = sopt.same_seed ? seed : splitmix64(seed ^ stream_of("stability.arm", r));
        const auto other = run_method(Xb, opt, d0, arm_seed).top(d0);
        total += static_cast<double>(selection_difference(original, other));
    }
    return total / static_cast<double>(sopt.reps);
}

// ---------------------------------------------------------------------------
// Efficiency / capacity grid
// ---------------------------------------------------------------------------

struct TradeoffCell {
    std::size_t k = 0;
    std::string n_tilde;
    std::string metric;
    double value = 0.0;
    double relative = 0.0;
};

/// Evaluates every (k, n_tilde) cell and divides each metric by the base cell's value.
inline std::vector<TradeoffCell> tradeoff_grid(const DataMatrix& X, const MethodOptions& opt, std::size_t d0,
                                               std::uint64_t seed, std::span<const std::size_t> k_grid,
                                               std::span<const CountSpec> n_tilde_grid, std::size_t base_k,
                                               const CountSpec& base_n_tilde, const EvaluationConfig& cfg) {
    require(is_ivfs(opt.method), "the trade-off grid applies to IVFS methods only");
    require(!k_grid.empty() && !n_tilde_grid.empty(), "trade-off grid is empty");
    const bool has_k = std::find(k_grid.begin(), k_grid.end(), base_k) != k_grid.end();
    const bool has_n = std::any_of(n_tilde_grid.begin(), n_tilde_grid.end(),
                                   [&](const CountSpec& c) { return c.str() == base_n_tilde.str(); });
    require(has_k && has_n, "base cell (k = " + std::to_string(base_k) + ", n_tilde = " + base_n_tilde.str() +
                                ") is not part of the grid");

    struct Cell {
        std::size_t k;
        CountSpec n;
        EvaluationReport report;
    };
    std::vector<Cell> cells;
    for (std::size_t k : k_grid)
        for (const auto& nt : n_tilde_grid) {
            MethodOptions o = opt;
            o.k = k;
            o.n_tilde = nt;
            const auto run = run_method(X, o, d0, seed);
            cells.push_back({k, nt, evaluate_selection(X, top_features(run.ranking, d0), cfg)});
        }
    const auto base = std::find_if(cells.begin(), cells.end(),
                                   [&](const Cell& c) { return c.k == base_k && c.n.str() == base_n_tilde.str(); });
    std::vector<TradeoffCell> out;
    for (const auto& c : cells)
        for (const auto& name : metric_names()) {
            if (!cfg.wants(name)) continue;
            const double v = c.report.get(name);
            const double b = base->report.get(name);
            const double rel = b != 0.0 ? v / b : (v == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN());
            out.push_back({c.k, c.n.str(), name, v, rel});
        }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle comparison
// ---------------------------------------------------------------------------

struct OracleTrial {
    std::uint64_t seed = 0;
    std::size_t overlap = 0;
    double mean_abs_error = 0.0;
    std::vector<double> estimate;
};

struct OracleComparison {
    std::vector<double> exact_iv;
    std::vector<std::size_t> exact_top;
    std::vector<OracleTrial> trials;
    double agreement_rate = 0.0;  // fraction of trials with full top-d0 overlap
};

/// Exact inclusion values next to `trials` IVFS runs with all rows per subset.
inline OracleComparison compare_with_oracle(const DataMatrix& X, std::size_t d_tilde, std::size_t k, std::size_t d0,
                                            NormKind norm, std::size_t trials, std::uint64_t seed,
                                            Normalization normalization = Normalization::OwnMax, std::size_t threads = 1) {
    require(trials >= 1, "trials must be >= 1");
    OracleComparison out;
    out.exact_iv = exact_inclusion_value(X, d_tilde, norm, normalization, threads);
    const auto exact_rank = argsort(out.exact_iv, true);
    out.exact_top.assign(exact_rank.begin(), exact_rank.begin() + static_cast<std::ptrdiff_t>(d0));

    IvfsConfig cfg;
    cfg.k = k;
    cfg.d_tilde = d_tilde;
    cfg.n_tilde = X.n();
    cfg.d0 = d0;
    cfg.norm = norm;
    cfg.normalization = normalization;
    cfg.threads = threads;
    std::size_t full = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        cfg.master_seed = splitmix64(seed ^ stream_of("oracle.trial", t));
        OracleTrial trial;
        trial.seed = cfg.master_seed;
        try {
            const auto res = run_ivfs(X, cfg);
            trial.estimate = res.final_scores;
            trial.overlap = d0 - selection_difference(out.exact_top, res.selected_in_rank_order());
        } catch (const RuntimeFailure&) {
            // Too few features sampled (tiny k): reported as zero overlap.
            trial.estimate.assign(X.d(), -std::numeric_limits<double>::infinity());
            trial.overlap = 0;
        }
        double err = 0.0;
        std::size_t seen = 0;
        for (std::size_t f = 0; f < X.d(); ++f)
            if (std::isfinite(trial.estimate[f])) {
                err += std::abs(trial.estimate[f] - out.exact_iv[f]);
                ++seen;
            }
        trial.mean_abs_error = seen ? err / static_cast<double>(seen) : std::numeric_limits<double>::quiet_NaN();
        if (trial.overlap == d0) ++full;
        out.trials.push_back(std::move(trial));
    }
    out.agreement_rate = static_cast<double>(full) / static_cast<double>(trials);
    return out;
}

}  // namespace ivfs
