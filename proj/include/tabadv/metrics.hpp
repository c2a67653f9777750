#pragma once

// Confusion-matrix statistics. The reported "AUC" is the mean of sensitivity
// and specificity at a fixed threshold (balanced accuracy), not the ROC
// integral; the rank-based ROC integral is also available under a distinct
// name for diagnostics only.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tabadv/errors.hpp"

namespace tabadv::metrics {

struct ConfusionMatrix {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Predicted positive iff probability >= threshold.
inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const double> y_prob,
                                 double threshold = 0.5) {
    if (y_true.size() != y_prob.size()) {
        throw ShapeError("confusion: " + std::to_string(y_true.size()) + " labels vs " +
                         std::to_string(y_prob.size()) + " probabilities");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("threshold must lie in (0,1)");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool pred = y_prob[i] >= threshold;
        if (y_true[i] == 1) {
            pred ? ++cm.tp : ++cm.fn;
        } else {
            pred ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

struct AucBreakdown {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double value = 0.0;
    /// True when a class was absent and its rate was pinned to 0.
    bool degenerate = false;
};

/// sensitivity = TP/(TP+FN), specificity = TN/(TN+FP), auc = their mean.
/// A zero denominator yields rate 0 with the degenerate flag set, never a
/// throw, so pipelines stay total.
inline AucBreakdown auc_breakdown(const ConfusionMatrix& cm) {
    AucBreakdown out;
    if (cm.tp + cm.fn == 0) {
        out.degenerate = true;
    } else {
        out.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    if (cm.tn + cm.fp == 0) {
        out.degenerate = true;
    } else {
        out.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    }
    out.value = 0.5 * (out.sensitivity + out.specificity);
    return out;
}

inline double auc(const ConfusionMatrix& cm) { return auc_breakdown(cm).value; }

/// Rank-based ROC integral (Mann-Whitney with midranks for ties). Diagnostic
/// output only; acceptance always uses the threshold-based measure above.
inline double roc_auc(std::span<const int> y_true, std::span<const double> y_prob) {
    if (y_true.size() != y_prob.size()) {
        throw ShapeError("roc_auc: label/probability length mismatch");
    }
    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return y_prob[a] < y_prob[b]; });

    double pos = 0.0, neg = 0.0;
    for (int l : y_true) (l == 1 ? pos : neg) += 1.0;
    if (pos == 0.0 || neg == 0.0) return 0.5;

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && y_prob[order[j + 1]] == y_prob[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] == 1) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    return (rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

}  // namespace tabadv::metrics
