#pragma once

#include "ivfs/metricspace.hpp"

namespace ivfs {

// ---------------------------------------------------------------------------
// Symmetric eigensolver
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius mass
/// drops below `tolerance` (scaled by max(1, ||A||_F)).
inline EigenDecomposition eigensym(const Matrix& A, double tolerance = 1e-10, std::size_t max_sweeps = 100) {
    const std::size_t n = A.rows();
    require(A.cols() == n, "eigensym needs a square matrix");
    double fro = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            require(std::abs(A(i, j) - A(j, i)) <= 1e-9 * std::max(1.0, std::abs(A(i, j))), "eigensym needs a symmetric matrix");
            fro += A(i, j) * A(i, j);
        }
    const double threshold = tolerance * std::max(1.0, std::sqrt(fro));

    Matrix a = A;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (A(i, j) + A(j, i));
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    std::size_t sweep = 0;
    for (; sweep < max_sweeps && off_mass() >= threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    if (off_mass() >= threshold) throw RuntimeFailure("Jacobi eigensolver did not converge");

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    const auto order = argsort(diag, false);
    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Similarity graphs
// ---------------------------------------------------------------------------

enum class GraphKind { RbfFull, KnnBinary };

inline const char* to_string(GraphKind k) { return k == GraphKind::RbfFull ? "rbf" : "knn"; }

inline GraphKind parse_graph_kind(std::string_view s) {
    if (s == "rbf" || s == "rbf-full") return GraphKind::RbfFull;
    if (s == "knn" || s == "knn-binary") return GraphKind::KnnBinary;
    throw InvalidArgument("unknown graph kind '" + std::string(s) + "' (expected rbf or knn)");
}

struct SimilarityGraph {
    Matrix weights;
    std::vector<double> degree;
    double sigma = 0.0;  // RBF bandwidth actually used (0 for knn graphs)
};

/// RbfFull: exp(-|xi-xj|^2 / (2 sigma^2)) with sigma the median nonzero
/// distance. KnnBinary: unit weight when either point is among the other's
/// k nearest (distance ties by lower index).
inline SimilarityGraph build_similarity(const DataMatrix& X, GraphKind kind, std::size_t k_neighbors = 5) {
    const std::size_t n = X.n();
    require(n >= 3, "similarity graph needs at least 3 points");
    const DistanceMatrix D = pairwise_distances(X);
    SimilarityGraph g{Matrix(n, n), std::vector<double>(n, 0.0), 0.0};

    if (kind == GraphKind::RbfFull) {
        std::vector<double> nonzero;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (D(i, j) > 0.0) nonzero.push_back(D(i, j));
        double sigma = 1.0;
        if (!nonzero.empty()) {
            std::sort(nonzero.begin(), nonzero.end());
            const std::size_t m = nonzero.size();
            sigma = m % 2 == 1 ? nonzero[m / 2] : 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]);
        }
        g.sigma = sigma;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) g.weights(i, j) = std::exp(-D(i, j) * D(i, j) / (2.0 * sigma * sigma));
    } else {
        require(k_neighbors >= 1 && k_neighbors < n, "k_neighbors must lie in [1, n)");
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> others;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) others.push_back(j);
            std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) { return D(i, a) < D(i, b); });
            for (std::size_t r = 0; r < k_neighbors; ++r) g.weights(i, others[r]) = g.weights(others[r], i) = 1.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g.degree[i] += g.weights(i, j);
        if (!(g.degree[i] > 0.0)) throw RuntimeFailure("similarity graph has an isolated vertex " + std::to_string(i));
    }
    return g;
}

struct FeatureRanking {
    std::vector<double> scores;
    std::vector<std::size_t> order;  // best first
    bool higher_is_better = true;
};

inline FeatureRanking make_ranking(std::vector<double> scores, bool higher_is_better) {
    FeatureRanking r;
    r.order = argsort(scores, higher_is_better);
    r.scores = std::move(scores);
    r.higher_is_better = higher_is_better;
    return r;
}

// ---------------------------------------------------------------------------
// SPEC
// ---------------------------------------------------------------------------

/// SPEC with the trivial eigenvector removed:
/// (f^T L f^) / (1 - (f^ . xi1)^2), lower is better. Features whose
/// weighted direction coincides with xi1 (constants) score +infinity.
inline FeatureRanking spec_rank(const DataMatrix& X, const SimilarityGraph& graph) {
    const std::size_t n = X.n();
    require(graph.weights.rows() == n && graph.degree.size() == n, "graph does not match the data");
    for (double deg : graph.degree)
        if (!(deg > 0.0)) throw InvalidArgument("degenerate graph: nonpositive degree");

    std::vector<double> sqrt_deg(n);
    double vol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sqrt_deg[i] = std::sqrt(graph.degree[i]);
        vol += graph.degree[i];
    }
    const double xi_norm = std::sqrt(vol);

    std::vector<double> scores(X.d());
    std::vector<double> g(n);
    for (std::size_t f = 0; f < X.d(); ++f) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += graph.degree[i] * X.values(i, f) * X.values(i, f);
        if (!(norm2 > 0.0)) {
            scores[f] = std::numeric_limits<double>::infinity();
            continue;
        }
        const double norm = std::sqrt(norm2);
        // g = D^{-1/2} f^ = f / |D^{1/2} f|
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = X.values(i, f) / norm;
            proj += sqrt_deg[i] * (sqrt_deg[i] * g[i]);
        }
        proj /= xi_norm;
        double wgg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += graph.weights(i, j) * g[j];
            wgg += g[i] * row;
        }
        const double numerator = 1.0 - wgg;
        const double denominator = 1.0 - proj * proj;
        scores[f] = denominator <= 1e-12 ? std::numeric_limits<double>::infinity() : std::max(0.0, numerator) / denominator;
    }
    return make_ranking(std::move(scores), false);
}

// ---------------------------------------------------------------------------
// Lasso and MCFS
// ---------------------------------------------------------------------------

struct LassoPathOptions {
    std::size_t n_lambdas = 100;
    double lambda_min_ratio = 1e-4;
    double tolerance = 1e-7;
    std::size_t max_sweeps = 1000;
};

/// L1-regularized least squares on standardized columns of X, traced down a
/// geometric lambda path until at least `support` coefficients are nonzero.
/// Returns the coefficients (standardized scale) at that point, trimmed to
/// the `support` largest magnitudes.
inline std::vector<double> lasso_support_path(const Matrix& X, std::span<const double> y, std::size_t support,
                                              const LassoPathOptions& opt = {}) {
    const std::size_t n = X.rows(), d = X.cols();
    require(y.size() == n, "response length does not match rows");
    require(support >= 1, "support must be >= 1");

    // Standardize columns and center the response.
    Matrix Z(n, d);
    std::vector<char> usable(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (X(i, j) - mean) * (X(i, j) - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
            usable[j] = 1;
            for (std::size_t i = 0; i < n; ++i) Z(i, j) = (X(i, j) - mean) / sd;
        }
    }
    double ymean = 0.0;
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - ymean;

    const double inv_n = 1.0 / static_cast<double>(n);
    auto correlation = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += Z(i, j) * r[i];
        return s * inv_n;
    };
    double lambda_max = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        if (usable[j]) lambda_max = std::max(lambda_max, std::abs(correlation(j)));

    std::vector<double> w(d, 0.0);
    if (lambda_max <= 0.0) return w;

    auto soft = [](double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); };
    // Columns have unit variance, so each coordinate update is a plain soft threshold.
    auto update = [&](std::size_t j, double lambda) {
        const double old = w[j];
        const double z = correlation(j) + old;
        const double next = soft(z, lambda);
        if (next != old) {
            const double delta = next - old;
            for (std::size_t i = 0; i < n; ++i) r[i] -= delta * Z(i, j);
            w[j] = next;
        }
        return std::abs(next - old);
    };

    const std::size_t target = std::min(support, static_cast<std::size_t>(std::count(usable.begin(), usable.end(), 1)));
    const double ratio = std::pow(opt.lambda_min_ratio, 1.0 / static_cast<double>(std::max<std::size_t>(opt.n_lambdas - 1, 1)));
    double lambda = lambda_max;
    for (std::size_t step = 0; step < opt.n_lambdas; ++step, lambda *= ratio) {
        for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            double full_change = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                if (usable[j]) full_change = std::max(full_change, update(j, lambda));
            if (full_change < opt.tolerance) break;
            // Iterate on the active set until it settles, then re-check everything.
            for (std::size_t inner = 0; inner < opt.max_sweeps; ++inner) {
                double change = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    if (w[j] != 0.0) change = std::max(change, update(j, lambda));
                if (change < opt.tolerance) break;
            }
        }
        const auto nnz = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; }));
        if (nnz >= target) break;
    }

    std::vector<double> mag(d);
    for (std::size_t j = 0; j < d; ++j) mag[j] = std::abs(w[j]);
    const auto order = argsort(mag, true);
    for (std::size_t rank = support; rank < d; ++rank) w[order[rank]] = 0.0;
    return w;
}

/// Multi-cluster feature selection: spectral embedding from L y = lambda D y
/// (trivial eigenvector dropped), one lasso per embedding coordinate, and
/// score(f) = max_j |w_fj|. Higher is better.
inline FeatureRanking mcfs_rank(const DataMatrix& X, const SimilarityGraph& graph, std::size_t n_clusters,
                                std::size_t n_select, std::size_t threads = 1) {
    const std::size_t n = X.n();
    require(graph.weights.rows() == n && graph.degree.size() == n, "graph does not match the data");
    require(n_clusters >= 1 && n_clusters < n, "n_clusters must lie in [1, n)");
    require(n_select >= 1, "n_select must be >= 1");

    // L_sym = I - D^{-1/2} W D^{-1/2}; generalized eigenvectors y = D^{-1/2} u.
    // t = D^{1/2} 1 is always in the null space; shifting it to eigenvalue 3
    // keeps it out of the embedding even when the graph is disconnected.
    double vol = 0.0;
    for (double v : graph.degree) vol += v;
    Matrix lsym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            lsym(i, j) = (i == j ? 1.0 : 0.0) - graph.weights(i, j) / std::sqrt(graph.degree[i] * graph.degree[j]) +
                         3.0 * std::sqrt(graph.degree[i] * graph.degree[j]) / vol;
    const auto eig = eigensym(lsym);

    std::vector<std::vector<double>> coefficients(n_clusters);
    parallel_for(n_clusters, threads, [&](std::size_t c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = eig.vectors(i, c) / std::sqrt(graph.degree[i]);
        coefficients[c] = lasso_support_path(X.values, y, n_select);
    });

    std::vector<double> scores(X.d(), 0.0);
    for (const auto& w : coefficients)
        for (std::size_t f = 0; f < X.d(); ++f) scores[f] = std::max(scores[f], std::abs(w[f]));
    return make_ranking(std::move(scores), true);
}

}  // namespace ivfs
