#pragma once

#include "ivfs/dataset.hpp"

#include <optional>

namespace ivfs {

/// Sorted set of distinct feature indices.
class FeatureSubset {
public:
    FeatureSubset() = default;

    /// Canonicalizes (sorts) and rejects duplicates.
    explicit FeatureSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        require(std::adjacent_find(indices_.begin(), indices_.end()) == indices_.end(),
                "feature subset contains duplicate indices");
    }

    static FeatureSubset all(std::size_t d) {
        std::vector<std::size_t> idx(d);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return FeatureSubset(std::move(idx));
    }

    std::span<const std::size_t> indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(std::size_t f) const { return std::binary_search(indices_.begin(), indices_.end(), f); }
    std::size_t max_index() const { return indices_.empty() ? 0 : indices_.back(); }

    bool operator==(const FeatureSubset&) const = default;

private:
    std::vector<std::size_t> indices_;
};

/// Symmetric n x n matrix with zero diagonal. `normalized` marks entries
/// that were divided by a maximum (so they lie in [0, 1]).
struct DistanceMatrix {
    Matrix entries;
    bool normalized = false;

    std::size_t n() const { return entries.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }

    double max_entry() const {
        const auto d = entries.data();
        return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
    }
};

enum class NormKind { LInf, L1, L2 };

inline const char* to_string(NormKind k) {
    switch (k) {
        case NormKind::LInf: return "linf";
        case NormKind::L1: return "l1";
        case NormKind::L2: return "l2";
    }
    return "?";
}

inline NormKind parse_norm_kind(std::string_view s) {
    if (s == "linf" || s == "l_inf" || s == "inf") return NormKind::LInf;
    if (s == "l1") return NormKind::L1;
    if (s == "l2") return NormKind::L2;
    throw InvalidArgument("unknown norm '" + std::string(s) + "' (expected linf, l1 or l2)");
}

/// How D_F is scaled before it is compared with the normalized D.
enum class Normalization {
    OwnMax,     // D_F / max(D_F)
    SharedMax,  // D_F / max(D)
};

inline const char* to_string(Normalization m) { return m == Normalization::OwnMax ? "own-max" : "shared-max"; }

inline Normalization parse_normalization(std::string_view s) {
    if (s == "own-max" || s == "own") return Normalization::OwnMax;
    if (s == "shared-max" || s == "shared") return Normalization::SharedMax;
    throw InvalidArgument("unknown normalization '" + std::string(s) + "' (expected own-max or shared-max)");
}

/// Raw Euclidean distances between the given rows over the given columns.
/// Each entry is accumulated over columns in ascending order, so distances
/// for a row subset equal the corresponding block of the full matrix bit for bit.
inline DistanceMatrix pairwise_distances(const Matrix& values, std::span<const std::size_t> rows,
                                         std::span<const std::size_t> cols) {
    const std::size_t m = rows.size();
    const std::size_t k = cols.size();
    for (std::size_t r : rows) require(r < values.rows(), "row index out of range");
    for (std::size_t c : cols) require(c < values.cols(), "feature index out of range");

    // Gather into a contiguous m x k block first.
    std::vector<double> block(m * k);
    for (std::size_t a = 0; a < m; ++a) {
        const auto src = values.row(rows[a]);
        for (std::size_t b = 0; b < k; ++b) block[a * k + b] = src[cols[b]];
    }
    DistanceMatrix D{Matrix(m, m), false};
    for (std::size_t a = 0; a < m; ++a) {
        const double* xa = block.data() + a * k;
        for (std::size_t b = a + 1; b < m; ++b) {
            const double* xb = block.data() + b * k;
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double t = xa[c] - xb[c];
                s += t * t;
            }
            const double dist = std::sqrt(s);
            D.entries(a, b) = dist;
            D.entries(b, a) = dist;
        }
    }
    return D;
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

/// Distances over `subset` (all features when absent); unnormalized.
inline DistanceMatrix pairwise_distances(const DataMatrix& X, const std::optional<FeatureSubset>& subset = std::nullopt) {
    const auto rows = iota_indices(X.n());
    if (!subset) {
        const auto cols = iota_indices(X.d());
        return pairwise_distances(X.values, rows, cols);
    }
    require(subset->empty() || subset->max_index() < X.d(), "feature index out of range");
    return pairwise_distances(X.values, rows, subset->indices());
}

/// The block of D restricted to `rows` (in that order); keeps D's flag.
inline DistanceMatrix restrict_rows(const DistanceMatrix& D, std::span<const std::size_t> rows) {
    DistanceMatrix out{Matrix(rows.size(), rows.size()), D.normalized};
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < rows.size(); ++b) out.entries(a, b) = D(rows[a], rows[b]);
    return out;
}

/// Divides every entry by `scale`; a zero scale leaves the entries untouched.
inline DistanceMatrix scale_by(DistanceMatrix D, double scale) {
    if (scale > 0.0)
        for (double& v : D.entries.data()) v /= scale;
    D.normalized = true;
    return D;
}

/// Divides by the largest entry. All-zero matrices are returned as-is.
inline DistanceMatrix normalize_max(DistanceMatrix D) {
    const double mx = D.max_entry();
    return scale_by(std::move(D), mx);
}

/// Norm of D - DF over all n^2 ordered pairs. Both inputs must be normalized.
inline double diff_norm(const DistanceMatrix& D, const DistanceMatrix& DF, NormKind kind) {
    require(D.n() == DF.n(), "distance matrices differ in size");
    require(D.normalized && DF.normalized, "diff_norm expects normalized distance matrices");
    const auto a = D.entries.data();
    const auto b = DF.entries.data();
    double acc = 0.0;
    switch (kind) {
        case NormKind::LInf:
            for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
            return acc;
        case NormKind::L1:
            for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
            return acc;
        case NormKind::L2:
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double t = a[i] - b[i];
                acc += t * t;
            }
            return std::sqrt(acc);
    }
    return acc;
}

}  // namespace ivfs
