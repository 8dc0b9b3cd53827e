#pragma once

// Dataset plumbing: dense CSV and sparse labeled text parsing, synthetic
// cluster generation, and the two contamination protocols the experiments
// use (label flips and injected far points). All operations have value
// semantics; nothing mutates its input.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "hull.hpp"
#include "random.hpp"

namespace jlrobust {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabeledDataset {
    PointSet points{1};
    std::vector<int> labels;                       // +1/-1 per point; empty when unlabeled
    std::string provenance;                        // where the data came from, for reports
    std::vector<std::size_t> injected_outliers;    // ground-truth contamination, sorted unique

    bool labeled() const { return !labels.empty(); }
    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.dim(); }

    void validate() const {
        if (labeled() && labels.size() != points.size())
            throw std::logic_error("LabeledDataset: label count does not match point count");
        for (const int l : labels)
            if (l != 1 && l != -1) throw std::logic_error("LabeledDataset: labels must be +1 or -1");
        if (!std::is_sorted(injected_outliers.begin(), injected_outliers.end()) ||
            std::adjacent_find(injected_outliers.begin(), injected_outliers.end()) != injected_outliers.end())
            throw std::logic_error("LabeledDataset: injected indices must be sorted and unique");
        for (const std::size_t i : injected_outliers)
            if (i >= points.size()) throw std::logic_error("LabeledDataset: injected index out of range");
    }
};

namespace detail {

// strict numeric cell: the whole token must parse, an optional leading '+'
// is tolerated because hand-written label columns use it
inline bool parse_double_token(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const char* const last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline bool parse_label_token(std::string_view tok, int& out) {
    double v = 0.0;
    if (!parse_double_token(tok, v)) return false;
    if (v != 1.0 && v != -1.0) return false;
    out = static_cast<int>(v);
    return true;
}

// input lines, final trailing newline tolerated, CR stripped
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (end == text.size() && line.empty()) break;
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string_view> split_cells(std::string_view line, char sep) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(sep, start);
        if (end == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return cells;
}

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

// ceil(fraction*n), robust against the product landing a few ulps above an
// integer (0.1*100 must inject exactly 10)
inline std::size_t injected_count(std::size_t n, double fraction) {
    const double raw = fraction * static_cast<double>(n) - 1e-9;
    if (raw <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(raw));
}

inline std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::logic_error("shortest: to_chars failed");
    return std::string(buf, ptr);
}

}  // namespace detail

// Dense CSV: one point per row, comma-separated reals, optionally a final +1
// or -1 label column when `labeled` says so. Dimension is inferred from the
// first row; every row must match it.
inline LabeledDataset parse_csv(std::string_view text, bool labeled = false,
                                std::string provenance = "csv:inline") {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("csv: empty input");

    LabeledDataset ds;
    ds.provenance = std::move(provenance);
    const std::size_t cells0 = detail::split_cells(lines[0], ',').size();
    if (labeled && cells0 < 2) throw ParseError("csv line 1: labeled rows need at least one feature cell");
    const std::size_t dim = labeled ? cells0 - 1 : cells0;
    ds.points = PointSet(dim);

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string where = "csv line " + std::to_string(li + 1);
        const auto cells = detail::split_cells(lines[li], ',');
        if (cells.size() != cells0)
            throw ParseError(where + ": expected " + std::to_string(cells0) + " cells, got " +
                             std::to_string(cells.size()));
        Point row(dim);
        for (std::size_t c = 0; c < dim; ++c)
            if (!detail::parse_double_token(cells[c], row[c]))
                throw ParseError(where + ": non-numeric cell '" + std::string(cells[c]) + "'");
        if (labeled) {
            int label = 0;
            if (!detail::parse_label_token(cells[dim], label))
                throw ParseError(where + ": label must be +1 or -1, got '" + std::string(cells[dim]) + "'");
            ds.labels.push_back(label);
        }
        ds.points.add_row(row);
    }
    return ds;
}

// Inverse of parse_csv; shortest round-trip formatting, so writing and
// re-reading reproduces both the values and the bytes.
inline std::string format_csv(const LabeledDataset& ds) {
    ds.validate();
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < ds.dim(); ++c) {
            if (c > 0) out += ',';
            out += detail::shortest(ds.points[i][c]);
        }
        if (ds.labeled()) {
            out += ',';
            out += std::to_string(ds.labels[i]);
        }
        out += '\n';
    }
    return out;
}

// Sparse labeled text: lines "L i1:v1 i2:v2 ...", L in {+1,-1}, 1-based
// feature indices, nondecreasing within a line (a repeat overwrites).
// Densified to the largest index seen anywhere; absent features are zero.
inline LabeledDataset parse_sparse_labeled(std::string_view text, std::string provenance = "sparse:inline") {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("sparse: empty input");

    std::vector<int> labels;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::size_t max_index = 0;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string where = "sparse line " + std::to_string(li + 1);
        const auto tokens = detail::split_whitespace(lines[li]);
        if (tokens.empty()) throw ParseError(where + ": empty line");

        int label = 0;
        if (!detail::parse_label_token(tokens[0], label))
            throw ParseError(where + ", token 1: label must be +1 or -1, got '" + std::string(tokens[0]) + "'");
        labels.push_back(label);

        std::vector<std::pair<std::size_t, double>> row;
        std::size_t prev = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const std::string at = where + ", token " + std::to_string(t + 1);
            const std::string_view tok = tokens[t];
            const std::size_t colon = tok.find(':');
            if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
                throw ParseError(at + ": expected 'index:value', got '" + std::string(tok) + "'");

            std::size_t index = 0;
            const std::string_view itok = tok.substr(0, colon);
            const auto [ptr, ec] = std::from_chars(itok.data(), itok.data() + itok.size(), index);
            if (ec != std::errc() || ptr != itok.data() + itok.size() || index == 0)
                throw ParseError(at + ": bad feature index '" + std::string(itok) + "'");
            if (index < prev)
                throw ParseError(at + ": feature indices must be nondecreasing");

            double value = 0.0;
            if (!detail::parse_double_token(tok.substr(colon + 1), value))
                throw ParseError(at + ": bad feature value '" + std::string(tok.substr(colon + 1)) + "'");

            if (index == prev && !row.empty())
                row.back().second = value;
            else
                row.emplace_back(index, value);
            prev = index;
            max_index = std::max(max_index, index);
        }
        rows.push_back(std::move(row));
    }
    if (max_index == 0) throw ParseError("sparse: no features anywhere in the input");

    LabeledDataset ds;
    ds.provenance = std::move(provenance);
    ds.labels = std::move(labels);
    ds.points = PointSet(max_index);
    for (const auto& row : rows) {
        Point dense(max_index, 0.0);
        for (const auto& [index, value] : row) dense[index - 1] = value;
        ds.points.add_row(dense);
    }
    return ds;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline LabeledDataset load_csv(const std::string& path, bool labeled = false) {
    return parse_csv(read_text_file(path), labeled, "csv:" + path);
}

inline LabeledDataset load_sparse_labeled(const std::string& path) {
    return parse_sparse_labeled(read_text_file(path), "sparse:" + path);
}

inline void save_csv(const std::string& path, const LabeledDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << format_csv(ds);
    if (!out) throw ParseError("write to '" + path + "' failed");
}

// k Gaussian blobs with centers at pairwise distance >= separation and
// per-coordinate noise stddev = spread. Centers stay away from the origin so
// one-class uses (which measure margins against the origin) are well posed.
// Points are laid out cluster by cluster; labels alternate by cluster parity.
inline LabeledDataset synth_clusters(std::size_t k, std::size_t per_cluster, std::size_t d, double spread,
                                     double separation, std::uint64_t seed) {
    if (k < 1 || per_cluster < 1 || d < 1)
        throw std::invalid_argument("synth_clusters: counts must be >= 1");
    if (!(spread >= 0.0) || !(separation >= 0.0))
        throw std::invalid_argument("synth_clusters: spread and separation must be >= 0");

    SplitRng rng(seed);
    const double lo = 1.0 + 3.0 * spread;
    const double span = separation * static_cast<double>(k + 1) + 1.0;

    PointSet centers(d);
    for (std::size_t c = 0; c < k; ++c) {
        Point candidate(d);
        bool ok = false;
        for (int tries = 0; tries < 100000 && !ok; ++tries) {
            for (std::size_t t = 0; t < d; ++t) candidate[t] = lo + span * rng.uniform01();
            ok = true;
            for (std::size_t prev = 0; prev < centers.size() && ok; ++prev)
                ok = distance(candidate, centers[prev]) >= separation;
        }
        if (!ok) throw std::logic_error("synth_clusters: could not place separated centers");
        centers.add_row(candidate);
    }

    LabeledDataset ds;
    ds.points = PointSet(d);
    char tag[160];
    std::snprintf(tag, sizeof(tag), "synth(k=%zu,per=%zu,d=%zu,spread=%g,sep=%g,seed=%llu)", k, per_cluster,
                  d, spread, separation, static_cast<unsigned long long>(seed));
    ds.provenance = tag;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < per_cluster; ++i) {
            Point p(d);
            for (std::size_t t = 0; t < d; ++t) p[t] = centers[c][t] + spread * rng.normal();
            ds.points.add_row(p);
            ds.labels.push_back(c % 2 == 0 ? 1 : -1);
        }
    return ds;
}

// Flip the labels of exactly ceil(fraction*n) uniformly chosen points and
// record which. Flipping again with the same seed restores the labels.
inline LabeledDataset inject_label_flip(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
    if (!ds.labeled()) throw std::invalid_argument("inject_label_flip: dataset has no labels");
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("inject_label_flip: fraction must lie in [0,1)");
    ds.validate();

    const std::size_t n = ds.size();
    const std::size_t c = detail::injected_count(n, fraction);
    LabeledDataset out = ds;
    if (c == 0) return out;

    SplitRng rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t t = 0; t < c; ++t) std::swap(idx[t], idx[t + rng.below(n - t)]);
    idx.resize(c);
    std::sort(idx.begin(), idx.end());

    for (const std::size_t i : idx) out.labels[i] = -out.labels[i];
    std::vector<std::size_t> merged;
    std::set_union(out.injected_outliers.begin(), out.injected_outliers.end(), idx.begin(), idx.end(),
                   std::back_inserter(merged));
    out.injected_outliers = std::move(merged);

    char tag[64];
    std::snprintf(tag, sizeof(tag), "+flip(%g,seed=%llu)", fraction, static_cast<unsigned long long>(seed));
    out.provenance += tag;
    return out;
}

// Append ceil(fraction*n) far points: per label group (the whole set when
// unlabeled), find an approximate smallest enclosing ball, then sample the
// new points uniformly on the sphere of radius scale*r around its center.
// Injected points take their group's label and land strictly outside the
// group's ball; a degenerate group (r = 0) uses a unit ball instead.
inline LabeledDataset inject_ball_outliers(const LabeledDataset& ds, double fraction, double scale,
                                           std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("inject_ball_outliers: fraction must lie in [0,1)");
    if (!(scale > 1.0)) throw std::invalid_argument("inject_ball_outliers: scale must exceed 1");
    ds.validate();
    if (ds.size() == 0) throw std::invalid_argument("inject_ball_outliers: empty dataset");

    LabeledDataset out = ds;
    const std::size_t n = ds.size();
    const std::size_t c = detail::injected_count(n, fraction);
    if (c == 0) return out;

    struct Group {
        Point center;
        double radius;
        int label;
    };
    std::vector<Group> groups;
    const auto add_group = [&](const std::vector<std::size_t>& members, int label) {
        if (members.empty()) return;
        const PointSet sub = ds.points.subset(members);
        const SparseSolution ball = bc_meb(sub, 0.1);
        const double r = covering_radius(sub, ball.point);
        groups.push_back({ball.point, r > 0.0 ? r : 1.0, label});
    };
    if (ds.labeled()) {
        std::vector<std::size_t> plus, minus;
        for (std::size_t i = 0; i < n; ++i) (ds.labels[i] > 0 ? plus : minus).push_back(i);
        add_group(plus, 1);
        add_group(minus, -1);
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        add_group(all, 0);
    }

    SplitRng rng(seed);
    const std::size_t d = ds.dim();
    std::vector<std::size_t> fresh;
    for (std::size_t t = 0; t < c; ++t) {
        const Group& g = groups[rng.below(groups.size())];
        Point u(d);
        double norm_u = 0.0;
        while (norm_u < 1e-9) {
            for (std::size_t j = 0; j < d; ++j) u[j] = rng.normal();
            norm_u = norm(u);
        }
        Point p(d);
        for (std::size_t j = 0; j < d; ++j) p[j] = g.center[j] + scale * g.radius * u[j] / norm_u;
        fresh.push_back(out.size());
        out.points.add_row(p);
        if (ds.labeled()) out.labels.push_back(g.label);
    }

    std::vector<std::size_t> merged;
    std::set_union(out.injected_outliers.begin(), out.injected_outliers.end(), fresh.begin(), fresh.end(),
                   std::back_inserter(merged));
    out.injected_outliers = std::move(merged);

    char tag[64];
    std::snprintf(tag, sizeof(tag), "+ball(%g,x%g,seed=%llu)", fraction, scale,
                  static_cast<unsigned long long>(seed));
    out.provenance += tag;
    return out;
}

// Per-label views for the two-class pipelines, with the original indices kept
// so trimmed points can be traced back.
struct TwoClassView {
    PointSet p1{1};
    PointSet p2{1};
    std::vector<std::size_t> idx1;  // original indices of p1's rows
    std::vector<std::size_t> idx2;
};

inline TwoClassView split_by_label(const LabeledDataset& ds) {
    if (!ds.labeled()) throw std::invalid_argument("split_by_label: dataset has no labels");
    ds.validate();
    TwoClassView view;
    for (std::size_t i = 0; i < ds.size(); ++i) (ds.labels[i] > 0 ? view.idx1 : view.idx2).push_back(i);
    if (view.idx1.empty() || view.idx2.empty())
        throw std::invalid_argument("split_by_label: both labels must be present");
    view.p1 = ds.points.subset(view.idx1);
    view.p2 = ds.points.subset(view.idx2);
    return view;
}

}  // namespace jlrobust
