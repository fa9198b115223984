#include "tarnn/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "tarnn/errors.hpp"

namespace tarnn {

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
    if (scores.empty())
        throw ContractError("confusion: empty input");
    if (scores.size() != labels.size())
        throw ContractError("confusion: " + std::to_string(scores.size()) + " scores vs " +
                            std::to_string(labels.size()) + " labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        const bool truth = labels[i] != 0;
        if (pred && truth)
            ++c.tp;
        else if (pred && !truth)
            ++c.fp;
        else if (!pred && truth)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

double f_beta(const ConfusionCounts& c, double beta) {
    if (!(beta > 0.0))
        throw ContractError("f_beta: beta must be positive");
    if (c.tp == 0)
        return 0.0;
    const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double b2 = beta * beta;
    return (1.0 + b2) * p * r / (b2 * p + r);
}

double sensitivity(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0)
        return 0.0;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw ContractError("auc_roc: bad input sizes");
    std::size_t n_pos = 0;
    for (int y : labels)
        if (y != 0)
            ++n_pos;
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("auc_roc: undefined, only one class present");

    // average ranks, ties shared
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]])
            ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based
        for (std::size_t k = i; k <= j; ++k)
            rank[idx[k]] = avg;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k] != 0)
            pos_rank_sum += rank[k];
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

} // namespace tarnn
