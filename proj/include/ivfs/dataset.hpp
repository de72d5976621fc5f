#pragma once

#include "ivfs/core.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ivfs {

/// n x d sample matrix with optional labels (contiguous 0..C-1) and names.
struct DataMatrix {
    Matrix values;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> feature_names;

    std::size_t n() const { return values.rows(); }
    std::size_t d() const { return values.cols(); }
    bool has_labels() const { return labels.has_value(); }

    std::size_t class_count() const {
        if (!labels || labels->empty()) return 0;
        return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
    }
};

/// Replaces labels by their rank among the distinct values.
inline std::vector<int> remap_contiguous(std::span<const long long> raw) {
    std::map<long long, int> ids;
    for (long long v : raw) ids.emplace(v, 0);
    int next = 0;
    for (auto& [_, id] : ids) id = next++;
    std::vector<int> out;
    out.reserve(raw.size());
    for (long long v : raw) out.push_back(ids.at(v));
    return out;
}

inline void validate(const DataMatrix& X) {
    require(X.n() >= 2, "data matrix needs at least 2 rows");
    require(X.d() >= 1, "data matrix needs at least 1 feature");
    for (double v : X.values.data()) require(std::isfinite(v), "data matrix contains a non-finite value");
    if (X.labels) {
        require(X.labels->size() == X.n(), "label count does not match row count");
        std::vector<char> seen(X.class_count(), 0);
        for (int c : *X.labels) {
            require(c >= 0, "negative class id");
            seen[static_cast<std::size_t>(c)] = 1;
        }
        require(std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; }),
                "class ids are not contiguous");
    }
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses a header-first CSV. Positions in errors are 1-based data rows
/// (the header is row 0) and 1-based columns.
inline DataMatrix parse_csv(std::istream& in, const std::optional<std::string>& label_column = std::nullopt) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("CSV is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> header;
    for (auto cell : detail::split_commas(line)) header.emplace_back(detail::trim(cell));

    std::optional<std::size_t> label_idx;
    if (label_column) {
        const auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end()) throw InvalidArgument("unknown label column '" + *label_column + "'");
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<double> values;
    std::vector<long long> raw_labels;
    std::size_t row = 0;
    const std::size_t width = header.size();
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto cells = detail::split_commas(line);
        if (cells.size() != width) {
            throw InvalidArgument("row " + std::to_string(row) + ": expected " + std::to_string(width) +
                                  " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const auto v = detail::parse_real(cells[c]);
            if (!v) {
                throw InvalidArgument("row " + std::to_string(row) + " column " + std::to_string(c + 1) +
                                      ": not a finite number '" + std::string(detail::trim(cells[c])) + "'");
            }
            if (label_idx && c == *label_idx) {
                if (*v != std::floor(*v)) {
                    throw InvalidArgument("row " + std::to_string(row) + " column " + std::to_string(c + 1) +
                                          ": label is not an integer");
                }
                raw_labels.push_back(static_cast<long long>(*v));
            } else {
                values.push_back(*v);
            }
        }
    }
    if (row == 0) throw InvalidArgument("CSV has a header but no data rows");

    DataMatrix X;
    const std::size_t d = width - (label_idx ? 1 : 0);
    if (d == 0) throw InvalidArgument("CSV has no feature columns");
    X.values = Matrix(row, d);
    std::copy(values.begin(), values.end(), X.values.data().begin());
    for (std::size_t c = 0; c < width; ++c)
        if (!label_idx || c != *label_idx) X.feature_names.push_back(header[c]);
    if (label_idx) X.labels = remap_contiguous(raw_labels);
    return X;
}

inline DataMatrix load_csv(const std::string& path, const std::optional<std::string>& label_column = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return parse_csv(in, label_column);
}

/// Column-wise z-score with population denominator; constant columns become 0.
inline DataMatrix standardize(const DataMatrix& X) {
    require(X.n() >= 2, "standardize needs at least 2 rows");
    DataMatrix out = X;
    const std::size_t n = X.n();
    for (std::size_t j = 0; j < X.d(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += X.values(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = X.values(i, j) - mean;
            var += c * c;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        // Relative cutoff: a column whose spread is pure rounding noise is constant.
        const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
        for (std::size_t i = 0; i < n; ++i)
            out.values(i, j) = constant ? 0.0 : (X.values(i, j) - mean) / sd;
    }
    return out;
}

/// Rows of X at `rows`, in that order (duplicates allowed).
inline DataMatrix take_rows(const DataMatrix& X, std::span<const std::size_t> rows) {
    DataMatrix out;
    out.values = Matrix(rows.size(), X.d());
    out.feature_names = X.feature_names;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r] < X.n(), "row index out of range");
        const auto src = X.values.row(rows[r]);
        std::copy(src.begin(), src.end(), out.values.row(r).begin());
    }
    if (X.labels) {
        out.labels.emplace();
        out.labels->reserve(rows.size());
        for (std::size_t r : rows) out.labels->push_back((*X.labels)[r]);
    }
    return out;
}

/// Like take_rows, but relabels classes to 0..C'-1 since a resample may drop a class.
inline DataMatrix take_rows_relabel(const DataMatrix& X, std::span<const std::size_t> rows) {
    DataMatrix out = take_rows(X, rows);
    if (out.labels) {
        std::vector<long long> raw(out.labels->begin(), out.labels->end());
        out.labels = remap_contiguous(raw);
    }
    return out;
}

/// Columns of X at `cols`, in that order.
inline DataMatrix take_columns(const DataMatrix& X, std::span<const std::size_t> cols) {
    DataMatrix out;
    out.values = Matrix(X.n(), cols.size());
    out.labels = X.labels;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        require(cols[c] < X.d(), "column index out of range");
        for (std::size_t i = 0; i < X.n(); ++i) out.values(i, c) = X.values(i, cols[c]);
        if (!X.feature_names.empty()) out.feature_names.push_back(X.feature_names[cols[c]]);
    }
    return out;
}

inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, const RngHandle& rng) {
    require(m >= 1 && m <= n, "subsample size must lie in [1, n]");
    auto engine = rng.engine();
    return sample_without_replacement(n, m, engine);
}

/// m distinct rows drawn uniformly without replacement.
inline DataMatrix subsample(const DataMatrix& X, std::size_t m, const RngHandle& rng) {
    const auto idx = subsample_indices(X.n(), m, rng);
    return take_rows_relabel(X, idx);
}

inline std::vector<std::size_t> bootstrap_indices(std::size_t n, double ratio, const RngHandle& rng) {
    require(ratio > 0.0 && ratio <= 1.0, "bootstrap ratio must lie in (0, 1]");
    const auto m = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-12));
    require(m >= 2, "bootstrap sample would have fewer than 2 rows");
    auto engine = rng.engine();
    std::vector<std::size_t> idx(m);
    for (auto& i : idx) i = static_cast<std::size_t>(engine.below(n));
    return idx;
}

/// ceil(ratio * n) rows drawn uniformly with replacement.
inline DataMatrix bootstrap(const DataMatrix& X, double ratio, const RngHandle& rng) {
    const auto idx = bootstrap_indices(X.n(), ratio, rng);
    return take_rows_relabel(X, idx);
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    bool stratified = false;
};

/// Random holdout split; stratified per class when every class has >= 2 members.
inline SplitIndices split_indices(std::span<const int> labels, double test_fraction, const RngHandle& rng) {
    require(test_fraction > 0.0 && test_fraction < 1.0, "test fraction must lie in (0, 1)");
    const std::size_t n = labels.size();
    require(n >= 2, "need at least 2 samples to split");
    const std::size_t classes = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

    auto engine = rng.engine();
    SplitIndices out;
    out.stratified = std::all_of(members.begin(), members.end(), [](const auto& m) { return m.size() >= 2; });

    auto take = [&](std::vector<std::size_t> pool, std::size_t n_test) {
        const auto perm = sample_without_replacement(pool.size(), pool.size(), engine);
        for (std::size_t r = 0; r < perm.size(); ++r) (r < n_test ? out.test : out.train).push_back(pool[perm[r]]);
    };
    auto test_count = [&](std::size_t size) {
        auto t = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(size) + 0.5));
        return std::clamp<std::size_t>(t, 1, size - 1);
    };

    if (out.stratified) {
        for (const auto& m : members) take(m, test_count(m.size()));
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        take(all, test_count(n));
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

/// Both parts keep the parent's class ids.
inline std::pair<DataMatrix, DataMatrix> train_test_split(const DataMatrix& X, double test_fraction,
                                                          const RngHandle& rng) {
    require(X.has_labels(), "train/test split needs labels");
    const auto s = split_indices(*X.labels, test_fraction, rng);
    return {take_rows(X, s.train), take_rows(X, s.test)};
}

/// Two balanced Gaussian clusters that differ only on the first
/// `n_informative` coordinates (mean offset 3 * noise_sd each).
inline DataMatrix synthesize(std::size_t n, std::size_t d, std::size_t n_informative, double noise_sd,
                             const RngHandle& rng) {
    require(n >= 2, "synthesize needs n >= 2");
    require(d >= 1, "synthesize needs d >= 1");
    require(n_informative <= d, "n_informative exceeds d");
    require(noise_sd > 0.0 && std::isfinite(noise_sd), "noise_sd must be positive");
    auto engine = rng.engine();
    DataMatrix X;
    X.values = Matrix(n, d);
    X.labels = std::vector<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = i < (n + 1) / 2 ? 0 : 1;
        (*X.labels)[i] = cls;
        for (std::size_t j = 0; j < d; ++j) {
            const double shift = (j < n_informative && cls == 1) ? 3.0 * noise_sd : 0.0;
            X.values(i, j) = shift + noise_sd * engine.normal();
        }
    }
    for (std::size_t j = 0; j < d; ++j) X.feature_names.push_back("f" + std::to_string(j));
    return X;
}

}  // namespace ivfs
