#pragma once

// Preprocessing spine: CSV ingestion, stratified 70:30 splitting, min-max
// scaling fitted on the training partition only, and SMOTE oversampling.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tabadv/errors.hpp"
#include "tabadv/numkernel.hpp"

namespace tabadv::data {

using num::Matrix;
using num::RngState;

/// Feature matrix (n x f, scaled to [0,1] once through the pipeline) plus a
/// binary label vector. The unit moved through every pipeline stage.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t n() const { return features.rows(); }
    std::size_t f() const { return features.cols(); }
};

inline std::uint64_t checksum(const Dataset& ds) {
    std::uint64_t h = num::checksum_doubles(ds.features.values());
    for (int l : ds.labels) h = h * 1099511628211ULL + static_cast<std::uint64_t>(l + 1);
    return h;
}

inline std::vector<std::size_t> class_indices(const Dataset& ds, int label) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] == label) idx.push_back(i);
    return idx;
}

inline Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.features = Matrix(rows.size(), ds.f());
    out.labels.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < ds.f(); ++c) out.features(r, c) = ds.features(rows[r], c);
        out.labels[r] = ds.labels[rows[r]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string s = trim(raw);
    if (s.empty()) {
        throw ParseError("empty cell at row " + std::to_string(row) + ", column " +
                         std::to_string(col));
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ParseError("unparsable cell '" + s + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col));
    }
    if (!std::isfinite(v)) {
        throw ParseError("non-finite cell at row " + std::to_string(row) + ", column " +
                         std::to_string(col));
    }
    return v;
}

}  // namespace detail

/// Header row required; label column defaults to the last column, or is picked
/// by name. Labels must be 0 or 1.
inline Dataset load_csv(const std::string& path, const std::string& label_column = "") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file " + path);
    const auto header = detail::split_line(line);
    if (header.size() < 2) throw ParseError("need at least one feature and a label column");

    std::size_t label_idx = header.size() - 1;
    if (!label_column.empty()) {
        bool found = false;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (detail::trim(header[i]) == label_column) {
                label_idx = i;
                found = true;
                break;
            }
        }
        if (!found) throw ParseError("label column '" + label_column + "' not found in header");
    }

    Dataset ds;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx) ds.feature_names.push_back(detail::trim(header[i]));

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) {
            ++row;
            continue;
        }
        const auto cells = detail::split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = detail::parse_cell(cells[c], row, c);
            if (c == label_idx) {
                if (v != 0.0 && v != 1.0) {
                    throw ParseError("label " + std::to_string(v) + " at row " +
                                     std::to_string(row) + " is outside {0,1}");
                }
                labels.push_back(static_cast<int>(v));
            } else {
                values.push_back(v);
            }
        }
        ++row;
    }
    if (labels.empty()) throw ParseError("no data rows in " + path);
    ds.features = Matrix(labels.size(), header.size() - 1, std::move(values));
    ds.labels = std::move(labels);
    return ds;
}

/// Round-trip-exact writer (%.17g), counterpart of load_csv.
inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t c = 0; c < ds.f(); ++c) {
        out << (c < ds.feature_names.size() ? ds.feature_names[c] : "f" + std::to_string(c))
            << ",";
    }
    out << "label\n";
    char buf[40];
    for (std::size_t r = 0; r < ds.n(); ++r) {
        for (std::size_t c = 0; c < ds.f(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features(r, c));
            out << buf << ",";
        }
        out << ds.labels[r] << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

/// Per class: floor(count * fraction) rows go to train, the remainder to test.
/// Shuffling is per-class and seed-deterministic; selected rows keep their
/// original relative order.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                                    std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DomainError("train_fraction must lie in (0,1)");
    }
    const auto zeros = class_indices(ds, 0);
    const auto ones = class_indices(ds, 1);
    if (zeros.empty() || ones.empty()) {
        throw StratificationError("stratified_split needs both classes present");
    }
    if (zeros.size() < 2 || ones.size() < 2) {
        throw StratificationError("stratified_split needs >= 2 members per class");
    }

    RngState rng(seed);
    std::vector<std::size_t> train_rows, test_rows;
    for (const auto* cls : {&zeros, &ones}) {
        const auto perm = num::shuffled_indices(rng, cls->size());
        const auto take =
            static_cast<std::size_t>(std::floor(static_cast<double>(cls->size()) * train_fraction));
        std::vector<std::size_t> tr, te;
        for (std::size_t k = 0; k < cls->size(); ++k) {
            ((k < take) ? tr : te).push_back((*cls)[perm[k]]);
        }
        train_rows.insert(train_rows.end(), tr.begin(), tr.end());
        test_rows.insert(test_rows.end(), te.begin(), te.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {take_rows(ds, train_rows), take_rows(ds, test_rows)};
}

// ---------------------------------------------------------------------------
// Min-max scaling
// ---------------------------------------------------------------------------

struct ScalerParams {
    std::vector<double> min, max;  // per column, from the fitted partition
};

inline ScalerParams fit_minmax(const Dataset& train) {
    ScalerParams p;
    p.min.assign(train.f(), 0.0);
    p.max.assign(train.f(), 0.0);
    for (std::size_t c = 0; c < train.f(); ++c) {
        double lo = train.features(0, c), hi = lo;
        for (std::size_t r = 1; r < train.n(); ++r) {
            lo = std::min(lo, train.features(r, c));
            hi = std::max(hi, train.features(r, c));
        }
        p.min[c] = lo;
        p.max[c] = hi;
    }
    return p;
}

/// x' = (x - min) / (max - min); constant columns map to 0; results clamp to
/// [0,1] so test rows outside the fitted range stay in bounds.
inline Dataset apply_minmax(const Dataset& ds, const ScalerParams& p) {
    if (p.min.size() != ds.f()) {
        throw ShapeError("scaler fitted on " + std::to_string(p.min.size()) +
                         " columns, dataset has " + std::to_string(ds.f()));
    }
    Dataset out = ds;
    for (std::size_t c = 0; c < ds.f(); ++c) {
        const double span = p.max[c] - p.min[c];
        for (std::size_t r = 0; r < ds.n(); ++r) {
            double v = span == 0.0 ? 0.0 : (ds.features(r, c) - p.min[c]) / span;
            out.features(r, c) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SMOTE
// ---------------------------------------------------------------------------

struct SmoteResult {
    Dataset dataset;
    bool applied = false;
    /// Set when the minority class had a single row and synthesis fell back to
    /// duplication.
    bool duplication_fallback = false;
};

namespace detail {

inline std::vector<std::size_t> k_nearest(const Matrix& feats,
                                          const std::vector<std::size_t>& pool, std::size_t self,
                                          std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t j : pool) {
        if (j == self) continue;
        double d2 = 0.0;
        for (std::size_t c = 0; c < feats.cols(); ++c) {
            const double d = feats(self, c) - feats(j, c);
            d2 += d * d;
        }
        dist.emplace_back(d2, j);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, dist.size()); ++i) out.push_back(dist[i].second);
    return out;
}

}  // namespace detail

/// Oversample the minority class to exactly match the majority count. Each
/// synthetic row is x + delta * (x_nn - x) with delta ~ U(0,1) and x_nn one of
/// the k nearest minority neighbors of a minority row x. Originals retained.
inline SmoteResult smote(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw DomainError("smote requires k >= 1");
    const auto zeros = class_indices(ds, 0);
    const auto ones = class_indices(ds, 1);
    if (zeros.empty() || ones.empty()) {
        throw StratificationError("smote needs both classes present");
    }
    if (zeros.size() == ones.size()) return {ds, false, false};

    const int minority_label = zeros.size() < ones.size() ? 0 : 1;
    const auto& minority = minority_label == 0 ? zeros : ones;
    const std::size_t need = (minority_label == 0 ? ones.size() : zeros.size()) - minority.size();

    RngState rng(seed);
    Dataset out;
    out.feature_names = ds.feature_names;
    out.features = Matrix(ds.n() + need, ds.f());
    out.labels.resize(ds.n() + need);
    for (std::size_t r = 0; r < ds.n(); ++r) {
        for (std::size_t c = 0; c < ds.f(); ++c) out.features(r, c) = ds.features(r, c);
        out.labels[r] = ds.labels[r];
    }

    SmoteResult result;
    if (minority.size() == 1) {
        // No neighbors to interpolate with; duplicate the lone row.
        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t dst = ds.n() + s;
            for (std::size_t c = 0; c < ds.f(); ++c)
                out.features(dst, c) = ds.features(minority[0], c);
            out.labels[dst] = minority_label;
        }
        result.duplication_fallback = true;
    } else {
        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t base = minority[rng.next_below(minority.size())];
            const auto nn = detail::k_nearest(ds.features, minority, base, k);
            const std::size_t pick = nn[rng.next_below(nn.size())];
            const double delta = rng.next_uniform();
            const std::size_t dst = ds.n() + s;
            for (std::size_t c = 0; c < ds.f(); ++c) {
                const double x = ds.features(base, c);
                out.features(dst, c) = x + delta * (ds.features(pick, c) - x);
            }
            out.labels[dst] = minority_label;
        }
    }
    result.dataset = std::move(out);
    result.applied = true;
    return result;
}

}  // namespace tabadv::data
