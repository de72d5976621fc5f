#pragma once

#include "ivfs/core.hpp"

#include <functional>

namespace ivfs {

/// Minimum-cost perfect assignment on a square cost matrix (primal-dual
/// Hungarian method with row potentials, O(n^3)).
template <class T = double>
struct Assignment {
    T cost{};
    std::vector<std::size_t> row_to_col;
};

template <class T = double>
Assignment<T> solve_assignment(const std::vector<std::vector<T>>& cost) {
    const std::size_t n = cost.size();
    for (const auto& row : cost) require(row.size() == n, "assignment needs a square cost matrix");
    Assignment<T> out;
    out.row_to_col.assign(n, 0);
    if (n == 0) return out;

    const T inf = std::numeric_limits<T>::max();
    // 1-based: column 0 is a virtual start column.
    std::vector<T> u(n + 1, T{}), v(n + 1, T{});
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<T> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            T delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const T cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
    // Sum the chosen entries directly rather than trusting the dual value.
    for (std::size_t i = 0; i < n; ++i) out.cost += cost[i][out.row_to_col[i]];
    return out;
}

/// Maximum bipartite matching size (Kuhn's augmenting paths) on an
/// adjacency predicate over left x right vertices.
template <class Allowed>
std::size_t max_bipartite_matching(std::size_t left, std::size_t right, Allowed&& allowed) {
    std::vector<std::size_t> match_right(right, left);
    std::vector<char> seen(right, 0);
    std::function<bool(std::size_t)> augment = [&](std::size_t l) {
        for (std::size_t r = 0; r < right; ++r) {
            if (seen[r] || !allowed(l, r)) continue;
            seen[r] = 1;
            if (match_right[r] == left || augment(match_right[r])) {
                match_right[r] = l;
                return true;
            }
        }
        return false;
    };
    std::size_t size = 0;
    for (std::size_t l = 0; l < left; ++l) {
        std::fill(seen.begin(), seen.end(), 0);
        if (augment(l)) ++size;
    }
    return size;
}

}  // namespace ivfs
