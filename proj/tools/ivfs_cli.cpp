// ivfs: feature selection and evaluation harness.
//
// Commands: select, evaluate, sweep, stability, tradeoff, oracle.
// Every flag can also be supplied through the environment as IVFS_<FLAG>,
// upper-cased with dashes turned into underscores (--d-tilde -> IVFS_D_TILDE).
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include "ivfs/ivfs_all.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string env_name(const std::string& flag) {
    std::string out = "IVFS_";
    for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

template <class T>
CLI::Option* flag_opt(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    return app->add_option("--" + name, target, help)->envname(env_name(name))->capture_default_str();
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::vector<T> split_list(const std::string& s, T (*parse)(std::string_view)) {
    std::vector<T> out;
    for (auto part : ivfs::detail::split_commas(s)) {
        part = ivfs::detail::trim(part);
        if (!part.empty()) out.push_back(parse(part));
    }
    return out;
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ivfs::InvalidArgument("not a count: '" + std::string(s) + "'");
    return v;
}

std::string parse_string(std::string_view s) { return std::string(s); }
ivfs::CountSpec parse_count_spec(std::string_view s) { return ivfs::CountSpec::parse(s); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string output_dir = ".";
};

struct DataOptions {
    std::string data;
    std::string synthetic;  // n,d,informative[,noise_sd]
    std::string label_column;
    bool raw = false;

    void attach(CLI::App* app) {
        flag_opt(app, "data", data, "CSV dataset (header row required)");
        flag_opt(app, "synthetic", synthetic, "generate data instead: n,d,informative[,noise_sd]");
        flag_opt(app, "label-column", label_column, "header of the class label column");
        app->add_flag("--raw", raw, "skip column standardization")->envname(env_name("raw"));
    }

    ivfs::DataMatrix load(std::uint64_t seed, json& meta) const {
        if (data.empty() == synthetic.empty()) throw ivfs::InvalidArgument("give exactly one of --data or --synthetic");
        ivfs::DataMatrix X;
        if (!data.empty()) {
            X = ivfs::load_csv(data, label_column.empty() ? std::nullopt : std::optional<std::string>(label_column));
            meta["dataset"] = {{"source", "csv"}, {"path", data}, {"label_column", label_column}};
        } else {
            const auto parts = split_list<std::string>(synthetic, parse_string);
            if (parts.size() != 3 && parts.size() != 4) throw ivfs::InvalidArgument("--synthetic expects n,d,informative[,noise_sd]");
            const double noise = parts.size() == 4 ? ivfs::detail::parse_real(parts[3]).value_or(-1.0) : 1.0;
            X = ivfs::synthesize(parse_size(parts[0]), parse_size(parts[1]), parse_size(parts[2]), noise,
                                 ivfs::RngHandle{seed, ivfs::stream_of("cli.synthesize")});
            meta["dataset"] = {{"source", "synthetic"}, {"spec", synthetic}};
        }
        ivfs::validate(X);
        if (!raw) X = ivfs::standardize(X);
        meta["dataset"]["n"] = X.n();
        meta["dataset"]["d"] = X.d();
        meta["dataset"]["classes"] = X.class_count();
        meta["dataset"]["standardized"] = !raw;
        return X;
    }
};

struct MethodFlags {
    std::string k = "1000";
    std::string d_tilde = "0.3";
    std::string n_tilde = "0.1";
    std::string normalization = "own-max";
    std::string spec_graph = "rbf";
    std::string mcfs_graph = "knn";
    std::size_t k_neighbors = 5;
    std::size_t clusters = 5;

    void attach(CLI::App* app, bool with_k = true) {
        if (with_k) flag_opt(app, "k", k, "number of random subsets (IVFS)");
        flag_opt(app, "d-tilde", d_tilde, "features per subset: fraction of d or abs:<count>");
        flag_opt(app, "n-tilde", n_tilde, "rows per subset: fraction of n or abs:<count>");
        flag_opt(app, "normalization", normalization, "D_F scaling: own-max or shared-max");
        flag_opt(app, "spec-graph", spec_graph, "SPEC similarity graph: rbf or knn");
        flag_opt(app, "mcfs-graph", mcfs_graph, "MCFS similarity graph: rbf or knn");
        flag_opt(app, "knn-neighbors", k_neighbors, "neighbors for knn graphs");
        flag_opt(app, "clusters", clusters, "MCFS number of clusters M");
    }

    ivfs::MethodOptions resolve(ivfs::Method m, std::size_t threads) const {
        ivfs::MethodOptions o;
        o.method = m;
        o.k = parse_size(k);
        o.d_tilde = ivfs::CountSpec::parse(d_tilde);
        o.n_tilde = ivfs::CountSpec::parse(n_tilde);
        o.normalization = ivfs::parse_normalization(normalization);
        o.spec_graph = ivfs::parse_graph_kind(spec_graph);
        o.mcfs_graph = ivfs::parse_graph_kind(mcfs_graph);
        o.k_neighbors = k_neighbors;
        o.clusters = clusters;
        o.threads = threads;
        return o;
    }

    json describe() const {
        return {{"k", k},
                {"d_tilde", d_tilde},
                {"n_tilde", n_tilde},
                {"normalization", normalization},
                {"spec_graph", spec_graph},
                {"mcfs_graph", mcfs_graph},
                {"knn_neighbors", k_neighbors},
                {"clusters", clusters}};
    }
};

struct EvalFlags {
    std::string metrics;
    double alpha = 0.8;
    double epsilon = 0.1;
    std::size_t max_points = 128;
    std::string k_grid = "1,3,5,10";
    std::size_t knn_repeats = 10;
    double test_fraction = 0.2;
    std::size_t kmeans_init = 10;

    void attach(CLI::App* app, const std::string& default_metrics) {
        metrics = default_metrics;
        flag_opt(app, "metrics", metrics, "comma-separated metrics (empty = all)");
        flag_opt(app, "alpha", alpha, "Rips threshold on the normalized filtration");
        flag_opt(app, "epsilon", epsilon, "minimum barcode length kept");
        flag_opt(app, "max-points", max_points, "rows used for persistence diagrams");
        flag_opt(app, "knn-grid", k_grid, "KNN neighbor counts");
        flag_opt(app, "knn-repeats", knn_repeats, "random 80/20 splits per K");
        flag_opt(app, "test-fraction", test_fraction, "holdout fraction for KNN");
        flag_opt(app, "kmeans-init", kmeans_init, "k-means restarts");
    }

    ivfs::EvaluationConfig resolve(std::uint64_t seed, ivfs::Normalization norm) const {
        ivfs::EvaluationConfig c;
        for (auto& m : split_list<std::string>(metrics, parse_string)) c.metrics.insert(m);
        ivfs::validate_metric_names(c.metrics);
        ivfs::require(alpha > 0.0 && alpha <= 1.0, "--alpha must lie in (0, 1]");
        ivfs::require(epsilon >= 0.0, "--epsilon must be >= 0");
        c.alpha = alpha;
        c.epsilon = epsilon;
        c.max_points = max_points;
        c.k_grid = split_list<std::size_t>(k_grid, parse_size);
        c.knn_repeats = knn_repeats;
        c.test_fraction = test_fraction;
        c.kmeans_n_init = kmeans_init;
        c.normalization = norm;
        c.seed = seed;
        return c;
    }

    json describe() const {
        return {{"metrics", metrics},       {"alpha", alpha},         {"epsilon", epsilon},
                {"max_points", max_points}, {"knn_grid", k_grid},     {"knn_repeats", knn_repeats},
                {"test_fraction", test_fraction}, {"kmeans_init", kmeans_init}};
    }
};

json base_meta(const std::string& command, const Globals& g) {
    json meta;
    meta["command"] = command;
    meta["version"] = ivfs::kVersion;
    meta["seed"] = g.seed;
    meta["stratified_knn_splits_when_feasible"] = true;
    return meta;
}

/// Wall-clock and thread count go to their own file so that every other
/// output is a pure function of the inputs and --seed.
void write_timing(const fs::path& dir, const Globals& g, double seconds) {
    write_json(dir / "timing.json", {{"elapsed_seconds", seconds}, {"threads", g.threads}});
}

fs::path prepare_dir(const Globals& g) {
    fs::path dir(g.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::size_t> read_feature_file(const std::string& path, std::size_t d) {
    std::ifstream in(path);
    if (!in) throw ivfs::InvalidArgument("cannot open feature file '" + path + "'");
    std::vector<std::size_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = ivfs::detail::trim(line);
        if (t.empty()) continue;
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw ivfs::InvalidArgument("feature file line " + std::to_string(lineno) + ": not an index");
        if (v >= d)
            throw ivfs::InvalidArgument("feature file line " + std::to_string(lineno) + ": index " + std::to_string(v) +
                                        " >= d = " + std::to_string(d));
        out.push_back(v);
    }
    if (out.empty()) throw ivfs::InvalidArgument("feature file '" + path + "' lists no features");
    return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SelectCmd {
    DataOptions data;
    MethodFlags method_flags;
    std::string method = "ivfs-linf";
    std::size_t d0 = 300;

    void attach(CLI::App* app) {
        data.attach(app);
        method_flags.attach(app);
        flag_opt(app, "method", method, "ivfs-linf | ivfs-l1 | ivfs-l2 | spec | mcfs");
        flag_opt(app, "d0", d0, "number of features to select");
    }

    void run(const Globals& g) const {
        json meta = base_meta("select", g);
        const auto X = data.load(g.seed, meta);
        const auto opt = method_flags.resolve(ivfs::parse_method(method), g.threads);
        ivfs::require(d0 >= 1, "--d0 must be >= 1");
        const auto result = ivfs::run_method(X, opt, d0, g.seed);
        const auto dir = prepare_dir(g);
        std::string body;
        for (std::size_t f : result.top(d0)) body += std::to_string(f) + "\n";
        write_text(dir / "selected_features.csv", body);
        meta["flags"] = method_flags.describe();
        meta["resolved"] = result.parameters;
        write_json(dir / "run_meta.json", meta);
        write_timing(dir, g, result.elapsed_seconds);
    }
};

struct EvaluateCmd {
    DataOptions data;
    EvalFlags eval;
    std::string features;
    std::string timing;
    std::string normalization = "own-max";

    void attach(CLI::App* app) {
        data.attach(app);
        eval.attach(app, "");
        flag_opt(app, "features", features, "feature list, one index per line")->required();
        flag_opt(app, "timing", timing, "timing.json from a select run, copied into the report");
        flag_opt(app, "normalization", normalization, "D_F scaling: own-max or shared-max");
    }

    void run(const Globals& g) const {
        json meta = base_meta("evaluate", g);
        const auto X = data.load(g.seed, meta);
        const auto list = read_feature_file(features, X.d());
        auto cfg = eval.resolve(g.seed, ivfs::parse_normalization(normalization));
        if (!timing.empty()) {
            std::ifstream in(timing);
            if (!in) throw ivfs::InvalidArgument("cannot open timing file '" + timing + "'");
            cfg.elapsed_seconds = json::parse(in).at("elapsed_seconds").get<double>();
        }
        cfg.parameters["features_file"] = fs::path(features).filename().string();
        cfg.parameters["seed"] = std::to_string(g.seed);
        const auto report = ivfs::evaluate_selection(X, ivfs::FeatureSubset(list), cfg);
        const auto dir = prepare_dir(g);
        write_json(dir / "report.json", ivfs::to_json(report));
        meta["flags"] = eval.describe();
        write_json(dir / "run_meta.json", meta);
    }
};

struct SweepCmd {
    DataOptions data;
    MethodFlags method_flags;
    EvalFlags eval;
    std::string methods = "ivfs-linf,spec,mcfs";
    std::size_t start = 1, stop = 10, step = 1;

    void attach(CLI::App* app) {
        data.attach(app);
        method_flags.attach(app);
        eval.attach(app, "l_inf,l1_over_n2,l2,w1,w_inf");
        flag_opt(app, "methods", methods, "comma-separated methods");
        flag_opt(app, "start", start, "smallest prefix size");
        flag_opt(app, "stop", stop, "largest prefix size");
        flag_opt(app, "step", step, "prefix size increment");
    }

    void run(const Globals& g) const {
        json meta = base_meta("sweep", g);
        const auto X = data.load(g.seed, meta);
        const auto list = split_list<ivfs::Method>(methods, ivfs::parse_method);
        ivfs::require(!list.empty(), "--methods is empty");
        ivfs::require(step >= 1, "--step must be >= 1");
        ivfs::require(start >= 1 && start <= stop && stop <= X.d(), "sweep range must satisfy 1 <= start <= stop <= d");
        const auto cfg = eval.resolve(g.seed, ivfs::parse_normalization(method_flags.normalization));
        std::string csv = "method,n_features,metric,value\n";
        json timings = json::object();
        double total_seconds = 0.0;
        for (auto m : list) {
            const auto run = ivfs::run_method(X, method_flags.resolve(m, g.threads), stop, g.seed);
            total_seconds += run.elapsed_seconds;
            meta["resolved"][ivfs::to_string(m)] = run.parameters;
            for (const auto& row : ivfs::sweep_prefixes(X, ivfs::to_string(m), run.ranking, start, stop, step, cfg))
                csv += row.method + "," + std::to_string(row.n_features) + "," + row.metric + "," + fmt(row.value) + "\n";
        }
        const auto dir = prepare_dir(g);
        write_text(dir / "sweep.csv", csv);
        meta["flags"] = method_flags.describe();
        meta["evaluation"] = eval.describe();
        meta["range"] = {{"start", start}, {"stop", stop}, {"step", step}};
        write_json(dir / "run_meta.json", meta);
        write_timing(dir, g, total_seconds);
    }
};

struct StabilityCmd {
    DataOptions data;
    MethodFlags method_flags;
    std::string methods = "spec,mcfs,ivfs-linf";
    std::size_t d0 = 300;
    std::size_t reps = 5;
    double ratio = 0.8;
    std::string resample = "bootstrap";
    std::string k_grid;
    bool same_seed = false;

    void attach(CLI::App* app) {
        data.attach(app);
        method_flags.attach(app);
        flag_opt(app, "methods", methods, "comma-separated methods");
        flag_opt(app, "d0", d0, "number of features to select");
        flag_opt(app, "reps", reps, "bootstrap repetitions");
        flag_opt(app, "ratio", ratio, "bootstrap size as a fraction of n");
        flag_opt(app, "resample", resample, "bootstrap or identity");
        flag_opt(app, "k-grid", k_grid, "comma-separated k values (IVFS methods; empty = --k)");
        app->add_flag("--same-seed", same_seed, "reuse the original arm's seed for every resample")
            ->envname(env_name("same-seed"));
    }

    void run(const Globals& g) const {
        json meta = base_meta("stability", g);
        const auto X = data.load(g.seed, meta);
        const auto list = split_list<ivfs::Method>(methods, ivfs::parse_method);
        ivfs::require(!list.empty(), "--methods is empty");
        ivfs::require(reps >= 1, "--reps must be >= 1");
        ivfs::StabilityOptions sopt{reps, ratio, ivfs::parse_resample(resample), same_seed};
        auto ks = split_list<std::size_t>(k_grid, parse_size);
        std::string csv = "method,k,reps,mean_difference\n";
        const auto t = ivfs::timed([&] {
            for (auto m : list) {
                auto opt = method_flags.resolve(m, g.threads);
                if (!ivfs::is_ivfs(m)) {
                    csv += std::string(ivfs::to_string(m)) + ",," + std::to_string(reps) + "," +
                           fmt(ivfs::stability_difference(X, opt, d0, g.seed, sopt)) + "\n";
                    continue;
                }
                const std::vector<std::size_t> grid = ks.empty() ? std::vector<std::size_t>{opt.k} : ks;
                for (std::size_t k : grid) {
                    opt.k = k;
                    csv += std::string(ivfs::to_string(m)) + "," + std::to_string(k) + "," + std::to_string(reps) + "," +
                           fmt(ivfs::stability_difference(X, opt, d0, g.seed, sopt)) + "\n";
                }
            }
        });
        const auto dir = prepare_dir(g);
        write_text(dir / "stability.csv", csv);
        meta["flags"] = method_flags.describe();
        meta["stability"] = {{"d0", d0}, {"reps", reps}, {"ratio", ratio}, {"resample", resample},
                             {"k_grid", k_grid}, {"same_seed", same_seed}};
        write_json(dir / "run_meta.json", meta);
        write_timing(dir, g, t);
    }
};

struct TradeoffCmd {
    DataOptions data;
    MethodFlags method_flags;
    EvalFlags eval;
    std::string method = "ivfs-linf";
    std::size_t d0 = 300;
    std::string k_grid = "1000,3000,5000";
    std::string n_tilde_grid = "0.1,0.3,0.5";
    std::size_t base_k = 1000;
    std::string base_n_tilde = "0.1";

    void attach(CLI::App* app) {
        data.attach(app);
        method_flags.attach(app, false);
        eval.attach(app, "l2,w_inf");
        flag_opt(app, "method", method, "IVFS variant");
        flag_opt(app, "d0", d0, "number of features to select");
        flag_opt(app, "k-grid", k_grid, "comma-separated k values");
        flag_opt(app, "n-tilde-grid", n_tilde_grid, "comma-separated n_tilde values (fractions or abs:<count>)");
        flag_opt(app, "base-k", base_k, "k of the reference cell");
        flag_opt(app, "base-n-tilde", base_n_tilde, "n_tilde of the reference cell");
    }

    void run(const Globals& g) const {
        json meta = base_meta("tradeoff", g);
        const auto X = data.load(g.seed, meta);
        const auto m = ivfs::parse_method(method);
        const auto ks = split_list<std::size_t>(k_grid, parse_size);
        const auto ns = split_list<ivfs::CountSpec>(n_tilde_grid, parse_count_spec);
        const auto cfg = eval.resolve(g.seed, ivfs::parse_normalization(method_flags.normalization));
        auto [cells, seconds] = ivfs::timed([&] {
            return ivfs::tradeoff_grid(X, method_flags.resolve(m, g.threads), d0, g.seed, ks, ns, base_k,
                                       ivfs::CountSpec::parse(base_n_tilde), cfg);
        });
        std::string csv = "k,n_tilde,metric,value,relative\n";
        for (const auto& c : cells)
            csv += std::to_string(c.k) + "," + c.n_tilde + "," + c.metric + "," + fmt(c.value) + "," + fmt(c.relative) + "\n";
        const auto dir = prepare_dir(g);
        write_text(dir / "tradeoff.csv", csv);
        meta["flags"] = method_flags.describe();
        meta["evaluation"] = eval.describe();
        meta["grid"] = {{"method", method}, {"d0", d0}, {"k_grid", k_grid}, {"n_tilde_grid", n_tilde_grid},
                        {"base_k", base_k}, {"base_n_tilde", base_n_tilde}};
        write_json(dir / "run_meta.json", meta);
        write_timing(dir, g, seconds);
    }
};

struct OracleCmd {
    DataOptions data;
    std::string d_tilde = "abs:3";
    std::size_t k = 20000;
    std::size_t d0 = 3;
    std::string norm = "linf";
    std::string normalization = "own-max";
    std::size_t trials = 20;

    void attach(CLI::App* app) {
        data.attach(app);
        flag_opt(app, "d-tilde", d_tilde, "features per subset: fraction of d or abs:<count>");
        flag_opt(app, "k", k, "number of random subsets per trial");
        flag_opt(app, "d0", d0, "number of features to select");
        flag_opt(app, "norm", norm, "linf, l1 or l2");
        flag_opt(app, "normalization", normalization, "D_F scaling: own-max or shared-max");
        flag_opt(app, "trials", trials, "independent IVFS runs");
    }

    void run(const Globals& g) const {
        json meta = base_meta("oracle", g);
        const auto X = data.load(g.seed, meta);
        const std::size_t dt = ivfs::CountSpec::parse(d_tilde).resolve(X.d());
        ivfs::require(d0 >= 1 && d0 <= X.d(), "--d0 must lie in [1, d]");
        auto [cmp, seconds] = ivfs::timed([&] {
            return ivfs::compare_with_oracle(X, dt, k, d0, ivfs::parse_norm_kind(norm), trials, g.seed,
                                             ivfs::parse_normalization(normalization), g.threads);
        });
        json out;
        out["d_tilde"] = dt;
        out["k"] = k;
        out["d0"] = d0;
        out["norm"] = norm;
        out["exact_iv"] = cmp.exact_iv;
        out["exact_top"] = cmp.exact_top;
        out["agreement_rate"] = cmp.agreement_rate;
        out["trials"] = json::array();
        for (const auto& t : cmp.trials) {
            json est = json::array();
            for (double v : t.estimate) est.push_back(std::isfinite(v) ? json(v) : json(nullptr));
            out["trials"].push_back({{"seed", t.seed}, {"overlap", t.overlap}, {"mean_abs_error", ivfs::detail::number_or_null(t.mean_abs_error)}, {"estimate", est}});
        }
        const auto dir = prepare_dir(g);
        write_json(dir / "oracle.json", out);
        write_json(dir / "run_meta.json", meta);
        write_timing(dir, g, seconds);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inclusion-value feature selection with topology-aware evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    flag_opt(&app, "seed", g.seed, "master random seed");
    flag_opt(&app, "threads", g.threads, "worker threads (0 = all cores); never changes results");
    flag_opt(&app, "output-dir", g.output_dir, "directory for result files");

    SelectCmd select;
    EvaluateCmd evaluate;
    SweepCmd sweep;
    StabilityCmd stability;
    TradeoffCmd tradeoff;
    OracleCmd oracle;
    auto* s1 = app.add_subcommand("select", "run one selector and write its top-d0 features");
    auto* s2 = app.add_subcommand("evaluate", "score a feature list with every quality metric");
    auto* s3 = app.add_subcommand("sweep", "metrics along each method's ranking prefixes");
    auto* s4 = app.add_subcommand("stability", "selection differences under bootstrap resampling");
    auto* s5 = app.add_subcommand("tradeoff", "relative performance over a (k, n_tilde) grid");
    auto* s6 = app.add_subcommand("oracle", "IVFS against exhaustive inclusion values");
    select.attach(s1);
    evaluate.attach(s2);
    sweep.attach(s3);
    stability.attach(s4);
    tradeoff.attach(s5);
    oracle.attach(s6);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*s1) select.run(g);
        else if (*s2) evaluate.run(g);
        else if (*s3) sweep.run(g);
        else if (*s4) stability.run(g);
        else if (*s5) tradeoff.run(g);
        else if (*s6) oracle.run(g);
    } catch (const ivfs::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
