#pragma once

#include "ivfs/assignment.hpp"
#include "ivfs/persistence.hpp"

namespace ivfs {

inline double linf_distance(const Barcode& a, const Barcode& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

/// Cost of matching a point to its nearest diagonal point.
inline double diagonal_cost(const Barcode& a) { return std::abs(a.death - a.birth) / 2.0; }

namespace detail {

inline void check_same_dimension(const PersistenceDiagram& X, const PersistenceDiagram& Y) {
    require(X.dimension == Y.dimension, "diagrams have different homology dimensions");
}

/// Augmented cost matrix of size (|X|+|Y|)^2: rows are X points then
/// diagonal slots, columns are Y points then diagonal slots. Diagonal slots
/// are interchangeable, so any point may use any slot.
inline std::vector<std::vector<double>> augmented_costs(const PersistenceDiagram& X, const PersistenceDiagram& Y) {
    const std::size_t p = X.size(), r = Y.size(), m = p + r;
    std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i < p && j < r) c[i][j] = linf_distance(X.barcodes[i], Y.barcodes[j]);
            else if (i < p) c[i][j] = diagonal_cost(X.barcodes[i]);
            else if (j < r) c[i][j] = diagonal_cost(Y.barcodes[j]);
        }
    return c;
}

}  // namespace detail

/// Exact bottleneck distance: binary search over the finite set of
/// candidate costs with a perfect-matching feasibility test.
inline double bottleneck_distance(const PersistenceDiagram& X, const PersistenceDiagram& Y) {
    detail::check_same_dimension(X, Y);
    const auto cost = detail::augmented_costs(X, Y);
    const std::size_t m = cost.size();
    if (m == 0) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& row : cost) candidates.insert(candidates.end(), row.begin(), row.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto feasible = [&](double t) {
        return max_bipartite_matching(m, m, [&](std::size_t i, std::size_t j) { return cost[i][j] <= t; }) == m;
    };
    std::size_t lo = 0, hi = candidates.size() - 1;  // the largest candidate is always feasible
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(candidates[mid])) hi = mid;
        else lo = mid + 1;
    }
    return candidates[lo];
}

/// Degree-q Wasserstein distance, (min sum cost^q)^(1/q), by exact assignment.
inline double wasserstein_distance(const PersistenceDiagram& X, const PersistenceDiagram& Y, double q = 1.0) {
    detail::check_same_dimension(X, Y);
    require(q > 0.0 && std::isfinite(q), "Wasserstein degree q must be a positive finite number");
    auto cost = detail::augmented_costs(X, Y);
    if (cost.empty()) return 0.0;
    if (q != 1.0)
        for (auto& row : cost)
            for (double& c : row) c = std::pow(c, q);
    const double total = solve_assignment(cost).cost;
    return q == 1.0 ? total : std::pow(total, 1.0 / q);
}

inline constexpr std::size_t kMaxOracleDiagramPoints = 8;

/// Exhaustive optimum over all augmented matchings. q = +infinity gives the
/// bottleneck distance; otherwise the degree-q Wasserstein distance.
inline double matching_oracle(const PersistenceDiagram& X, const PersistenceDiagram& Y, double q) {
    detail::check_same_dimension(X, Y);
    require(X.size() + Y.size() <= kMaxOracleDiagramPoints, "matching_oracle supports at most 8 points in total");
    require(q > 0.0, "q must be positive");
    const bool bottleneck = std::isinf(q);
    auto combine = [&](double acc, double c) { return bottleneck ? std::max(acc, c) : acc + std::pow(c, q); };

    std::vector<char> used(Y.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double)> recurse = [&](std::size_t i, double acc) {
        if (i == X.size()) {
            for (std::size_t j = 0; j < Y.size(); ++j)
                if (!used[j]) acc = combine(acc, diagonal_cost(Y.barcodes[j]));
            best = std::min(best, acc);
            return;
        }
        recurse(i + 1, combine(acc, diagonal_cost(X.barcodes[i])));
        for (std::size_t j = 0; j < Y.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            recurse(i + 1, combine(acc, linf_distance(X.barcodes[i], Y.barcodes[j])));
            used[j] = 0;
        }
    };
    recurse(0, 0.0);
    return bottleneck ? best : std::pow(best, 1.0 / q);
}

}  // namespace ivfs
