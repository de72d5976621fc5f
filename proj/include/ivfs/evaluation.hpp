#pragma once

#include "ivfs/assignment.hpp"
#include "ivfs/diagram_metrics.hpp"
#include "ivfs/persistence.hpp"

#include <chrono>
#include <map>
#include <set>

namespace ivfs {

// ---------------------------------------------------------------------------
// Supervised and clustering metrics
// ---------------------------------------------------------------------------

namespace detail {

inline double squared_distance(const Matrix& A, std::size_t a, const Matrix& B, std::size_t b,
                               std::span<const std::size_t> cols) {
    double s = 0.0;
    const auto ra = A.row(a), rb = B.row(b);
    for (std::size_t c : cols) {
        const double t = ra[c] - rb[c];
        s += t * t;
    }
    return s;
}

inline void check_subset(const DataMatrix& X, const FeatureSubset& F) {
    require(!F.empty(), "feature subset is empty");
    require(F.max_index() < X.d(), "feature index out of range");
}

}  // namespace detail

/// Mean holdout accuracy of majority-vote KNN for each K, maximized over K.
/// Distance ties go to the lower train index, vote ties to the lower class id.
inline double knn_accuracy(const DataMatrix& X, const FeatureSubset& F, std::span<const std::size_t> k_grid,
                           std::size_t repeats, double test_fraction, const RngHandle& rng) {
    require(X.has_labels(), "knn_accuracy needs labels");
    require(repeats >= 1, "repeats must be >= 1");
    require(!k_grid.empty(), "K grid is empty");
    detail::check_subset(X, F);
    const auto& labels = *X.labels;
    const std::size_t classes = X.class_count();
    const std::size_t k_max = *std::max_element(k_grid.begin(), k_grid.end());

    std::vector<double> correct_sum(k_grid.size(), 0.0);
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        const auto split = split_indices(labels, test_fraction, rng.derive("knn.split", rep));
        for (std::size_t K : k_grid)
            if (K < 1 || K >= split.train.size())
                throw InvalidArgument("K = " + std::to_string(K) + " must lie in [1, train size " +
                                      std::to_string(split.train.size()) + ")");

        std::vector<std::size_t> hits(k_grid.size(), 0);
        std::vector<std::pair<double, std::size_t>> nearest(split.train.size());
        std::vector<std::size_t> votes(classes);
        for (std::size_t t : split.test) {
            for (std::size_t r = 0; r < split.train.size(); ++r)
                nearest[r] = {detail::squared_distance(X.values, t, X.values, split.train[r], F.indices()), r};
            std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(k_max), nearest.end());
            for (std::size_t g = 0; g < k_grid.size(); ++g) {
                std::fill(votes.begin(), votes.end(), 0);
                for (std::size_t r = 0; r < k_grid[g]; ++r) ++votes[static_cast<std::size_t>(labels[split.train[nearest[r].second]])];
                const auto winner = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
                if (winner == labels[t]) ++hits[g];
            }
        }
        for (std::size_t g = 0; g < k_grid.size(); ++g)
            correct_sum[g] += static_cast<double>(hits[g]) / static_cast<double>(split.test.size());
    }
    return *std::max_element(correct_sum.begin(), correct_sum.end()) / static_cast<double>(repeats);
}

struct Clustering {
    std::vector<int> assignment;
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `n_init` restarts.
/// An empty cluster is re-seeded at the point farthest from its centroid.
inline Clustering kmeans(const DataMatrix& X, const FeatureSubset& F, std::size_t clusters, std::size_t n_init,
                         const RngHandle& rng, std::size_t max_iterations = 300) {
    detail::check_subset(X, F);
    const std::size_t n = X.n();
    require(clusters >= 1 && clusters <= n, "cluster count must lie in [1, n]");
    require(n_init >= 1, "n_init must be >= 1");
    const auto cols = F.indices();
    const std::size_t k = cols.size();
    const Matrix P = take_columns(X, cols).values;
    const auto all = iota_indices(k);

    Clustering best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t run = 0; run < n_init; ++run) {
        auto engine = rng.derive("kmeans.init", run).engine();
        Matrix centers(clusters, k);
        std::vector<double> closest(n, std::numeric_limits<double>::infinity());
        for (std::size_t c = 0; c < clusters; ++c) {
            std::size_t pick = 0;
            if (c == 0) {
                pick = static_cast<std::size_t>(engine.below(n));
            } else {
                double total = 0.0;
                for (double v : closest) total += v;
                if (total <= 0.0) {
                    pick = static_cast<std::size_t>(engine.below(n));
                } else {
                    double u = engine.uniform() * total;
                    pick = n - 1;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (u < closest[i]) {
                            pick = i;
                            break;
                        }
                        u -= closest[i];
                    }
                }
            }
            std::copy(P.row(pick).begin(), P.row(pick).end(), centers.row(c).begin());
            for (std::size_t i = 0; i < n; ++i)
                closest[i] = std::min(closest[i], detail::squared_distance(P, i, centers, c, all));
        }

        std::vector<int> assign(n, -1);
        std::vector<double> dist(n, 0.0);
        for (std::size_t it = 0; it < max_iterations; ++it) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                int arg = 0;
                double bestd = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < clusters; ++c) {
                    const double dd = detail::squared_distance(P, i, centers, c, all);
                    if (dd < bestd) {
                        bestd = dd;
                        arg = static_cast<int>(c);
                    }
                }
                dist[i] = bestd;
                if (assign[i] != arg) {
                    assign[i] = arg;
                    changed = true;
                }
            }
            if (!changed) break;

            Matrix sums(clusters, k);
            std::vector<std::size_t> counts(clusters, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(assign[i]);
                ++counts[c];
                for (std::size_t j = 0; j < k; ++j) sums(c, j) += P(i, j);
            }
            for (std::size_t c = 0; c < clusters; ++c) {
                if (counts[c] == 0) {
                    const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                    std::copy(P.row(far).begin(), P.row(far).end(), centers.row(c).begin());
                    dist[far] = 0.0;
                    continue;
                }
                for (std::size_t j = 0; j < k; ++j) centers(c, j) = sums(c, j) / static_cast<double>(counts[c]);
            }
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += detail::squared_distance(P, i, centers, static_cast<std::size_t>(assign[i]), all);
        if (inertia < best.inertia) best = {assign, inertia};
    }
    return best;
}

/// Fraction of points on the best one-to-one cluster/class matching.
inline double clustering_accuracy(std::span<const int> assignment, std::span<const int> labels) {
    require(assignment.size() == labels.size() && !labels.empty(), "label vectors differ in length");
    const auto size = static_cast<std::size_t>(
        std::max(*std::max_element(assignment.begin(), assignment.end()), *std::max_element(labels.begin(), labels.end())) + 1);
    std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < labels.size(); ++i)
        cost[static_cast<std::size_t>(assignment[i])][static_cast<std::size_t>(labels[i])] -= 1.0;
    const auto a = solve_assignment(cost);
    return -a.cost / static_cast<double>(labels.size());
}

inline double kmeans_accuracy(const DataMatrix& X, const FeatureSubset& F, std::size_t n_init, const RngHandle& rng) {
    require(X.has_labels(), "kmeans_accuracy needs labels");
    const std::size_t classes = X.class_count();
    require(classes >= 2, "kmeans_accuracy needs at least 2 classes");
    const auto cl = kmeans(X, F, classes, n_init, rng);
    return clustering_accuracy(cl.assignment, *X.labels);
}

namespace detail {

/// Entropy of a count table; summed in ascending order so equal multisets
/// give bit-identical results.
inline double entropy(std::vector<double> counts, double total) {
    std::sort(counts.begin(), counts.end());
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    return h;
}

}  // namespace detail

/// Normalized mutual information I(U;V) / sqrt(H(U) H(V)), natural logs;
/// 0 when either labeling has zero entropy.
inline double nmi(std::span<const int> u, std::span<const int> v) {
    require(u.size() == v.size(), "label vectors differ in length");
    require(!u.empty(), "label vectors are empty");
    std::map<int, double> cu, cv;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cu[u[i]] += 1.0;
        cv[v[i]] += 1.0;
        joint[{u[i], v[i]}] += 1.0;
    }
    auto values = [](const auto& m) {
        std::vector<double> out;
        for (const auto& [_, c] : m) out.push_back(c);
        return out;
    };
    const auto total = static_cast<double>(u.size());
    const double hu = detail::entropy(values(cu), total);
    const double hv = detail::entropy(values(cv), total);
    if (hu <= 0.0 || hv <= 0.0) return 0.0;
    const double huv = detail::entropy(values(joint), total);
    const double mi = (hu + hv) - huv;
    return std::clamp(mi / std::sqrt(hu * hv), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Combined report
// ---------------------------------------------------------------------------

/// Wall-clock seconds of one call, monotonic clock.
template <class Fn>
auto timed(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<std::invoke_result_t<Fn>>) {
        fn();
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else {
        auto result = fn();
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return std::pair{std::move(result), s};
    }
}

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"knn_accuracy", "kmeans_accuracy", "nmi", "w1",
                                                "w_inf", "l_inf", "l1_over_n2", "l2"};
    return names;
}

struct EvaluationConfig {
    std::vector<std::size_t> k_grid{1, 3, 5, 10};
    std::size_t knn_repeats = 10;
    double test_fraction = 0.2;
    std::size_t kmeans_n_init = 10;
    double alpha = 0.8;
    double epsilon = 0.1;
    std::size_t max_points = 128;
    Normalization normalization = Normalization::OwnMax;
    std::uint64_t seed = 0;
    std::set<std::string> metrics;  // empty = all
    double elapsed_seconds = 0.0;   // selection time to carry into the report
    std::map<std::string, std::string> parameters;

    bool wants(const std::string& m) const { return metrics.empty() || metrics.count(m) != 0; }
};

/// NaN marks a metric that was not computed.
struct EvaluationReport {
    double knn_accuracy = std::numeric_limits<double>::quiet_NaN();
    double kmeans_accuracy = std::numeric_limits<double>::quiet_NaN();
    double nmi = std::numeric_limits<double>::quiet_NaN();
    double w1 = std::numeric_limits<double>::quiet_NaN();
    double w_inf = std::numeric_limits<double>::quiet_NaN();
    double l_inf = std::numeric_limits<double>::quiet_NaN();
    double l1_over_n2 = std::numeric_limits<double>::quiet_NaN();
    double l2 = std::numeric_limits<double>::quiet_NaN();
    double elapsed_seconds = 0.0;
    std::map<std::string, std::string> parameters;

    double get(std::string_view name) const {
        if (name == "knn_accuracy") return knn_accuracy;
        if (name == "kmeans_accuracy") return kmeans_accuracy;
        if (name == "nmi") return nmi;
        if (name == "w1") return w1;
        if (name == "w_inf") return w_inf;
        if (name == "l_inf") return l_inf;
        if (name == "l1_over_n2") return l1_over_n2;
        if (name == "l2") return l2;
        throw InvalidArgument("unknown metric '" + std::string(name) + "'");
    }
};

inline void validate_metric_names(const std::set<std::string>& names) {
    for (const auto& m : names)
        require(std::find(metric_names().begin(), metric_names().end(), m) != metric_names().end(),
                "unknown metric '" + m + "'");
}

/// Diagram distances between the H1 diagrams of two normalized matrices
/// over the same point subsample.
struct DiagramComparison {
    double wasserstein1 = 0.0;
    double bottleneck = 0.0;
};

inline DiagramComparison compare_h1(const DistanceMatrix& D, const DistanceMatrix& DF, double alpha, double epsilon,
                                    std::size_t max_points, const RngHandle& rng) {
    const auto a = filter_noise(compute_persistence(build_rips(D, alpha, max_points, rng)).second, epsilon);
    const auto b = filter_noise(compute_persistence(build_rips(DF, alpha, max_points, rng)).second, epsilon);
    return {wasserstein_distance(a, b, 1.0), bottleneck_distance(a, b)};
}

/// Every selection-quality metric for the subset F of X.
inline EvaluationReport evaluate_selection(const DataMatrix& X, const FeatureSubset& F, const EvaluationConfig& cfg) {
    detail::check_subset(X, F);
    validate_metric_names(cfg.metrics);
    EvaluationReport rep;
    rep.elapsed_seconds = cfg.elapsed_seconds;
    rep.parameters = cfg.parameters;
    rep.parameters["alpha"] = std::to_string(cfg.alpha);
    rep.parameters["epsilon"] = std::to_string(cfg.epsilon);
    rep.parameters["max_points"] = std::to_string(cfg.max_points);
    rep.parameters["normalization"] = to_string(cfg.normalization);
    rep.parameters["n_features"] = std::to_string(F.size());
    const RngHandle root{cfg.seed, stream_of("evaluation")};

    if (X.has_labels()) {
        if (cfg.wants("knn_accuracy")) {
            const auto split = split_indices(*X.labels, cfg.test_fraction, root.derive("knn.split", 0));
            rep.parameters["knn_split"] = split.stratified ? "stratified" : "random";
            rep.knn_accuracy = knn_accuracy(X, F, cfg.k_grid, cfg.knn_repeats, cfg.test_fraction, root.derive("knn"));
        }
        if ((cfg.wants("kmeans_accuracy") || cfg.wants("nmi")) && X.class_count() >= 2) {
            const auto cl = kmeans(X, F, X.class_count(), cfg.kmeans_n_init, root.derive("kmeans"));
            if (cfg.wants("kmeans_accuracy")) rep.kmeans_accuracy = clustering_accuracy(cl.assignment, *X.labels);
            if (cfg.wants("nmi")) rep.nmi = nmi(cl.assignment, *X.labels);
        }
    }

    const bool norms = cfg.wants("l_inf") || cfg.wants("l1_over_n2") || cfg.wants("l2");
    const bool diagrams = cfg.wants("w1") || cfg.wants("w_inf");
    if (norms || diagrams) {
        DistanceMatrix D = pairwise_distances(X);
        const double raw_max = D.max_entry();
        D = normalize_max(std::move(D));
        DistanceMatrix DF = pairwise_distances(X, F);
        DF = cfg.normalization == Normalization::OwnMax ? normalize_max(std::move(DF)) : scale_by(std::move(DF), raw_max);
        if (norms) {
            const auto n2 = static_cast<double>(X.n()) * static_cast<double>(X.n());
            rep.l_inf = diff_norm(D, DF, NormKind::LInf);
            rep.l1_over_n2 = diff_norm(D, DF, NormKind::L1) / n2;
            rep.l2 = diff_norm(D, DF, NormKind::L2);
        }
        if (diagrams) {
            const auto cmp = compare_h1(D, DF, cfg.alpha, cfg.epsilon, cfg.max_points, root.derive("rips"));
            rep.w1 = cmp.wasserstein1;
            rep.w_inf = cmp.bottleneck;
        }
    }
    if (!cfg.wants("l_inf")) rep.l_inf = std::numeric_limits<double>::quiet_NaN();
    if (!cfg.wants("l1_over_n2")) rep.l1_over_n2 = std::numeric_limits<double>::quiet_NaN();
    if (!cfg.wants("l2")) rep.l2 = std::numeric_limits<double>::quiet_NaN();
    if (!cfg.wants("w1")) rep.w1 = std::numeric_limits<double>::quiet_NaN();
    if (!cfg.wants("w_inf")) rep.w_inf = std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace ivfs
