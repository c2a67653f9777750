#pragma once

// The two white-box victim classifiers: logistic regression trained by
// full-batch gradient descent, and a CART decision tree split on Gini
// impurity. Both are deterministic given their inputs.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "tabadv/dataprep.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/numkernel.hpp"
#include "tabadv/wavenet.hpp"

namespace tabadv::victims {

using data::Dataset;
using num::Matrix;

/// Probabilities are clamped strictly inside (0,1); keeps log-loss finite and
/// the output contract honest even at saturation.
inline constexpr double kProbFloor = 1e-15;

inline double clamp_prob(double p) {
    return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
};

inline std::vector<double> predict_proba_lr(const LogisticModel& m, const Matrix& x) {
    if (x.cols() != m.weights.size()) {
        throw ShapeError("predict_proba_lr: " + std::to_string(x.cols()) +
                         " features vs model width " + std::to_string(m.weights.size()));
    }
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double z = m.bias;
        for (std::size_t c = 0; c < x.cols(); ++c) z += m.weights[c] * x(r, c);
        out[r] = clamp_prob(net::sigmoid(z));
    }
    return out;
}

/// Full-batch gradient descent on mean cross-entropy from zero-initialized
/// parameters. Stops at `epochs` or when the gradient infinity-norm drops
/// below 1e-6. No randomness, so identical runs give identical weights.
inline LogisticModel train_lr(const Dataset& ds, std::size_t epochs = 500, double lr = 0.1) {
    bool has0 = false, has1 = false;
    for (int l : ds.labels) (l == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw TrainingError("train_lr needs both classes present");

    const std::size_t n = ds.n(), f = ds.f();
    LogisticModel m;
    m.weights.assign(f, 0.0);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::vector<double> gw(f, 0.0);
        double gb = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double z = m.bias;
            for (std::size_t c = 0; c < f; ++c) z += m.weights[c] * ds.features(r, c);
            const double err = net::sigmoid(z) - static_cast<double>(ds.labels[r]);
            for (std::size_t c = 0; c < f; ++c) gw[c] += err * ds.features(r, c);
            gb += err;
        }
        double inf_norm = std::abs(gb) / static_cast<double>(n);
        for (std::size_t c = 0; c < f; ++c) {
            gw[c] /= static_cast<double>(n);
            inf_norm = std::max(inf_norm, std::abs(gw[c]));
        }
        gb /= static_cast<double>(n);
        if (inf_norm < 1e-6) break;
        for (std::size_t c = 0; c < f; ++c) m.weights[c] -= lr * gw[c];
        m.bias -= lr * gb;
    }
    return m;
}

/// Mean cross-entropy of the model on a dataset (diagnostic; convexity tests).
inline double lr_loss(const LogisticModel& m, const Dataset& ds) {
    const auto probs = predict_proba_lr(m, ds.features);
    double loss = 0.0;
    for (std::size_t r = 0; r < ds.n(); ++r) {
        loss -= ds.labels[r] == 1 ? std::log(probs[r]) : std::log(1.0 - probs[r]);
    }
    return loss / static_cast<double>(ds.n());
}

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

/// 1 - p0^2 - p1^2 over a binary label slice.
inline double gini(std::span<const int> labels) {
    if (labels.empty()) throw DomainError("gini of empty label set");
    double ones = 0.0;
    for (int l : labels) ones += l;
    const double p1 = ones / static_cast<double>(labels.size());
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeNode {
    // Internal node when left/right are set; leaf otherwise.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left, right;
    int label = 0;      // leaf: majority label (ties predict 0)
    double p1 = 0.0;    // leaf: class-1 fraction

    bool is_leaf() const { return !left; }
};

struct DtConfig {
    std::size_t max_depth = 8;
    std::size_t min_samples_split = 2;
};

namespace detail {

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

inline double subset_gini(const std::vector<int>& labels) {
    double ones = 0.0;
    for (int l : labels) ones += l;
    const double p1 = ones / static_cast<double>(labels.size());
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

/// Best split by maximum Gini-impurity decrease. Candidate thresholds are
/// midpoints of consecutive sorted unique values; ties break toward the lower
/// feature index, then the lower threshold.
inline Split best_split(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Split best;
    const double parent = [&] {
        std::vector<int> l;
        l.reserve(rows.size());
        for (auto r : rows) l.push_back(ds.labels[r]);
        return subset_gini(l);
    }();
    const double n = static_cast<double>(rows.size());

    for (std::size_t c = 0; c < ds.f(); ++c) {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (auto r : rows) vals.emplace_back(ds.features(r, c), ds.labels[r]);
        std::sort(vals.begin(), vals.end());

        // Sweep sorted order, tracking left-side counts at each boundary
        // between distinct values.
        double left_n = 0.0, left_ones = 0.0, total_ones = 0.0;
        for (const auto& v : vals) total_ones += v.second;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left_n += 1.0;
            left_ones += vals[i].second;
            if (vals[i].first == vals[i + 1].first) continue;
            const double threshold = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
            const double right_n = n - left_n;
            const double lp1 = left_ones / left_n;
            const double rp1 = (total_ones - left_ones) / right_n;
            const double gl = 1.0 - lp1 * lp1 - (1.0 - lp1) * (1.0 - lp1);
            const double gr = 1.0 - rp1 * rp1 - (1.0 - rp1) * (1.0 - rp1);
            const double decrease = parent - (left_n / n) * gl - (right_n / n) * gr;
            if (!best.found || decrease > best.decrease) {
                best = {true, c, threshold, decrease};
            }
        }
    }
    if (best.found && best.decrease <= 0.0) best.found = false;
    return best;
}

inline std::unique_ptr<TreeNode> grow(const Dataset& ds, const std::vector<std::size_t>& rows,
                                      const DtConfig& cfg, std::size_t depth) {
    auto node = std::make_unique<TreeNode>();
    double ones = 0.0;
    for (auto r : rows) ones += ds.labels[r];
    node->p1 = ones / static_cast<double>(rows.size());
    node->label = node->p1 > 0.5 ? 1 : 0;

    const bool pure = ones == 0.0 || ones == static_cast<double>(rows.size());
    if (pure || depth >= cfg.max_depth || rows.size() < cfg.min_samples_split) return node;

    const Split split = best_split(ds, rows);
    if (!split.found) return node;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
        (ds.features(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    node->feature = split.feature;
    node->threshold = split.threshold;
    node->left = grow(ds, left_rows, cfg, depth + 1);
    node->right = grow(ds, right_rows, cfg, depth + 1);
    return node;
}

}  // namespace detail

inline std::unique_ptr<TreeNode> train_dt(const Dataset& ds, const DtConfig& cfg = {}) {
    if (cfg.max_depth == 0) throw ConfigError("max_depth must be >= 1");
    bool has0 = false, has1 = false;
    for (int l : ds.labels) (l == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw TrainingError("train_dt needs both classes present at the root");
    std::vector<std::size_t> rows(ds.n());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return detail::grow(ds, rows, cfg, 0);
}

struct DtPrediction {
    std::vector<int> labels;
    std::vector<double> probabilities;  // leaf class-1 fraction
};

/// Route left when the value is <= threshold (ties go left).
inline DtPrediction predict_dt(const TreeNode& tree, const Matrix& x) {
    DtPrediction out;
    out.labels.resize(x.rows());
    out.probabilities.resize(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const TreeNode* node = &tree;
        while (!node->is_leaf()) {
            if (node->feature >= x.cols()) {
                throw ShapeError("predict_dt: tree splits on feature " +
                                 std::to_string(node->feature) + ", input has " +
                                 std::to_string(x.cols()));
            }
            node = x(r, node->feature) <= node->threshold ? node->left.get() : node->right.get();
        }
        out.labels[r] = node->label;
        out.probabilities[r] = node->p1;
    }
    return out;
}

inline std::size_t tree_depth(const TreeNode& t) {
    if (t.is_leaf()) return 0;
    return 1 + std::max(tree_depth(*t.left), tree_depth(*t.right));
}

}  // namespace tabadv::victims
