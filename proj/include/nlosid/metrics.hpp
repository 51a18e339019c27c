// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Confusion statistics, accuracy variants and ROC curves. Positive = NLOS.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "common.hpp"

namespace nlosid {

struct ConfusionStats {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }

    /// fp / (fp + tn); empty when no LOS sample was evaluated.
    std::optional<double> pfa() const {
        if (fp + tn == 0) return std::nullopt;
        return static_cast<double>(fp) / static_cast<double>(fp + tn);
    }

    /// fn / (fn + tp); empty when no NLOS sample was evaluated.
    std::optional<double> pmd() const {
        if (fn + tp == 0) return std::nullopt;
        return static_cast<double>(fn) / static_cast<double>(fn + tp);
    }

    bool operator==(const ConfusionStats&) const = default;
};

inline void accumulate(ConfusionStats& s, Label truth, Label predicted) {
    if (truth == Label::Nlos)
        (predicted == Label::Nlos ? s.tp : s.fn)++;
    else
        (predicted == Label::Nlos ? s.fp : s.tn)++;
}

inline ConfusionStats confusion(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) throw invalid_argument("truth/prediction length mismatch");
    if (truth.empty()) throw invalid_argument("confusion needs at least one sample");
    ConfusionStats s;
    for (std::size_t i = 0; i < truth.size(); ++i) accumulate(s, truth[i], predicted[i]);
    return s;
}

struct AccuracyMetrics {
    double paper_accuracy = 0.0;     // (1 - (pmd + pfa)) * 100, unclamped
    double standard_accuracy = 0.0;  // (tp + tn) / total * 100
    double balanced_accuracy = 0.0;  // (1 - (pmd + pfa) / 2) * 100
};

inline std::optional<AccuracyMetrics> accuracy_metrics(const ConfusionStats& s) {
    const auto pfa = s.pfa();
    const auto pmd = s.pmd();
    if (!pfa || !pmd) return std::nullopt;
    AccuracyMetrics a;
    a.paper_accuracy = (1.0 - (*pmd + *pfa)) * 100.0;
    a.standard_accuracy = static_cast<double>(s.tp + s.tn) / static_cast<double>(s.total()) * 100.0;
    a.balanced_accuracy = (1.0 - (*pmd + *pfa) / 2.0) * 100.0;
    return a;
}

/// Accuracy variants from rates alone (no sample counts).
inline AccuracyMetrics accuracy_from_rates(double pfa, double pmd) {
    AccuracyMetrics a;
    a.paper_accuracy = (1.0 - (pmd + pfa)) * 100.0;
    a.balanced_accuracy = (1.0 - (pmd + pfa) / 2.0) * 100.0;
    a.standard_accuracy = a.balanced_accuracy;  // equal class weights
    return a;
}

// ----- ROC -------------------------------------------------------------------

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep over sorted unique scores (higher = more NLOS). Tied
/// scores move together as one diagonal step; AUC by the trapezoidal rule.
inline RocCurve roc(std::span<const double> scores, std::span<const Label> truth) {
    if (scores.size() != truth.size()) throw invalid_argument("score/label length mismatch");
    std::size_t n_pos = 0;
    for (Label l : truth) n_pos += (l == Label::Nlos);
    const std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw invalid_argument("ROC needs both LOS and NLOS samples");
    for (double s : scores)
        if (std::isnan(s)) throw invalid_argument("ROC scores must not be NaN");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    double area = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        const std::size_t tp0 = tp, fp0 = fp;
        while (i < order.size() && scores[order[i]] == s) {
            (truth[order[i]] == Label::Nlos ? tp : fp)++;
            ++i;
        }
        area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) / 2.0;
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    curve.auc = area / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return curve;
}

}  // namespace nlosid
