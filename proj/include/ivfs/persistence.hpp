#pragma once

#include "ivfs/metricspace.hpp"

#include <array>
#include <cstdio>
#include <ostream>

namespace ivfs {

/// Vertex, edge or triangle. Unused vertex slots hold kNoVertex.
struct Simplex {
    static constexpr std::uint32_t kNoVertex = std::numeric_limits<std::uint32_t>::max();

    std::array<std::uint32_t, 3> vertices{kNoVertex, kNoVertex, kNoVertex};
    std::uint8_t dim = 0;
    double value = 0.0;

    bool operator==(const Simplex&) const = default;
};

/// Orders by (value, dimension, vertices).
inline bool filtration_less(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
}

struct RipsFiltration {
    std::size_t n = 0;
    double alpha = 0.8;
    std::vector<Simplex> simplices;
    std::vector<std::size_t> points;  // rows of the source matrix used as vertices

    std::size_t count(std::uint8_t dim) const {
        return static_cast<std::size_t>(
            std::count_if(simplices.begin(), simplices.end(), [dim](const Simplex& s) { return s.dim == dim; }));
    }
};

struct Barcode {
    double birth = 0.0;
    double death = 0.0;

    double persistence() const { return death - birth; }
    auto operator<=>(const Barcode&) const = default;
};

struct PersistenceDiagram {
    int dimension = 0;
    std::vector<Barcode> barcodes;

    std::size_t size() const { return barcodes.size(); }
    bool empty() const { return barcodes.empty(); }

    /// Sorted copy of the barcodes, for multiset comparison.
    std::vector<Barcode> sorted() const {
        auto b = barcodes;
        std::sort(b.begin(), b.end());
        return b;
    }
};

/// Rips filtration up to triangles on the normalized matrix D. When D has
/// more than `max_points` rows, a subsample chosen by `rng` is used; equal
/// handles pick equal rows, so two matrices over the same samples stay comparable.
inline RipsFiltration build_rips(const DistanceMatrix& D, double alpha, std::size_t max_points, const RngHandle& rng) {
    require(D.normalized, "build_rips expects a normalized distance matrix");
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(max_points >= 1, "max_points must be >= 1");

    RipsFiltration filt;
    filt.alpha = alpha;
    if (D.n() > max_points) {
        filt.points = subsample_indices(D.n(), max_points, rng);
        std::sort(filt.points.begin(), filt.points.end());
    } else {
        filt.points = iota_indices(D.n());
    }
    const std::size_t n = filt.points.size();
    filt.n = n;
    auto dist = [&](std::size_t a, std::size_t b) { return D(filt.points[a], filt.points[b]); };

    std::vector<char> adjacent(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        Simplex v;
        v.vertices[0] = static_cast<std::uint32_t>(a);
        filt.simplices.push_back(v);
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double w = dist(a, b);
            if (w <= alpha) {
                adjacent[a * n + b] = adjacent[b * n + a] = 1;
                filt.simplices.push_back(
                    {{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), Simplex::kNoVertex}, 1, w});
            }
        }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!adjacent[a * n + b]) continue;
            for (std::size_t c = b + 1; c < n; ++c) {
                if (!adjacent[a * n + c] || !adjacent[b * n + c]) continue;
                const double w = std::max({dist(a, b), dist(a, c), dist(b, c)});
                filt.simplices.push_back(
                    {{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c)}, 2, w});
            }
        }
    std::sort(filt.simplices.begin(), filt.simplices.end(), filtration_less);
    return filt;
}

namespace detail {

inline void add_column(std::vector<std::uint32_t>& target, const std::vector<std::uint32_t>& source,
                       std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                  std::back_inserter(scratch));
    target.swap(scratch);
}

}  // namespace detail

/// Persistence in dimensions 0 and 1 by Z/2 column reduction in the given
/// simplex order. Unpaired creators die at alpha; zero-length bars are kept.
inline std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(const RipsFiltration& filt) {
    const auto& S = filt.simplices;
    const std::size_t m = S.size();
    const std::size_t n = filt.n;
    constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();

    std::vector<std::uint32_t> vertex_pos(n, kAbsent);
    std::vector<std::uint32_t> edge_pos(n * n, kAbsent);
    std::vector<std::vector<std::uint32_t>> columns(m);
    auto fail = [](const std::string& what) { throw InvalidArgument("malformed filtration: " + what); };

    for (std::size_t j = 0; j < m; ++j) {
        const Simplex& s = S[j];
        if (j > 0 && S[j - 1].value > s.value) fail("filtration values decrease");
        if (s.value > filt.alpha) fail("simplex above alpha");
        for (std::size_t v = 0; v <= s.dim; ++v)
            if (s.vertices[v] >= n) fail("vertex index out of range");
        const auto pos = static_cast<std::uint32_t>(j);
        switch (s.dim) {
            case 0:
                if (s.value != 0.0) fail("vertex with nonzero value");
                vertex_pos[s.vertices[0]] = pos;
                break;
            case 1: {
                const auto a = s.vertices[0], b = s.vertices[1];
                if (!(a < b)) fail("edge vertices not increasing");
                if (vertex_pos[a] == kAbsent || vertex_pos[b] == kAbsent) fail("edge before its vertices");
                columns[j] = {std::min(vertex_pos[a], vertex_pos[b]), std::max(vertex_pos[a], vertex_pos[b])};
                edge_pos[a * n + b] = pos;
                break;
            }
            case 2: {
                const auto a = s.vertices[0], b = s.vertices[1], c = s.vertices[2];
                if (!(a < b && b < c)) fail("triangle vertices not increasing");
                const std::uint32_t faces[3] = {edge_pos[a * n + b], edge_pos[a * n + c], edge_pos[b * n + c]};
                for (auto f : faces)
                    if (f == kAbsent) fail("triangle before its edges");
                columns[j] = {faces[0], faces[1], faces[2]};
                std::sort(columns[j].begin(), columns[j].end());
                break;
            }
            default: fail("unsupported simplex dimension");
        }
    }

    std::vector<std::uint32_t> pivot_owner(m, kAbsent);  // low row -> column
    std::vector<char> paired(m, 0);
    std::vector<std::uint32_t> scratch;
    PersistenceDiagram h0{0, {}}, h1{1, {}};

    // Cycles created by edges that are still waiting for a triangle. Once none
    // remain, the remaining triangle columns cannot pair with anything.
    std::size_t open_cycles = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (S[j].dim == 0) continue;
        if (S[j].dim == 2 && open_cycles == 0) continue;
        auto& col = columns[j];
        while (!col.empty() && pivot_owner[col.back()] != kAbsent) detail::add_column(col, columns[pivot_owner[col.back()]], scratch);
        if (col.empty()) {
            if (S[j].dim == 1) ++open_cycles;
            continue;
        }
        const std::uint32_t low = col.back();
        pivot_owner[low] = static_cast<std::uint32_t>(j);
        paired[low] = paired[j] = 1;
        const Barcode bar{S[low].value, S[j].value};
        if (S[j].dim == 1) {
            h0.barcodes.push_back(bar);
        } else {
            h1.barcodes.push_back(bar);
            --open_cycles;
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (paired[j] || S[j].dim == 2) continue;
        if (S[j].dim == 1 && !columns[j].empty()) continue;
        (S[j].dim == 0 ? h0 : h1).barcodes.push_back({S[j].value, filt.alpha});
    }
    return {std::move(h0), std::move(h1)};
}

/// Keeps the bars with death - birth >= epsilon.
inline PersistenceDiagram filter_noise(const PersistenceDiagram& diag, double epsilon) {
    require(epsilon >= 0.0, "epsilon must be >= 0");
    PersistenceDiagram out{diag.dimension, {}};
    for (const auto& b : diag.barcodes)
        if (b.death - b.birth >= epsilon) out.barcodes.push_back(b);
    return out;
}

/// CSV with header `dimension,birth,death`; values printed round-trip exact.
inline void write_diagram_csv(std::ostream& out, std::span<const PersistenceDiagram> diagrams) {
    out << "dimension,birth,death\n";
    char buf[64];
    for (const auto& diag : diagrams)
        for (const auto& b : diag.barcodes) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", diag.dimension, b.birth, b.death);
            out << buf;
        }
}

}  // namespace ivfs
