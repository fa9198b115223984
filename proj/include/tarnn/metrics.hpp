#pragma once

#include <cstdint>
#include <span>

namespace tarnn {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

/// Predict positive iff score >= threshold.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold = 0.5);

/// F-beta from confusion counts; recall weighted beta times more than
/// precision. Degenerate denominators (tp == 0) return 0.
double f_beta(const ConfusionCounts& c, double beta);

/// Recall on the positive class; 0 when there are no positives.
double sensitivity(const ConfusionCounts& c);

/// Rank-based (Mann-Whitney) AUC with ties counted as one half.
/// Both classes must be present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

} // namespace tarnn
