#pragma once

#include <string>
#include <vector>

#include "tarnn/data.hpp"
#include "tarnn/model.hpp"

namespace tarnn {

struct PreparedTraining {
    std::vector<WindowedSample> samples;
    Scaler scaler;                          // fit on this data, kept features only
    std::vector<std::string> feature_names; // after exclusions
    std::vector<std::string> demographic_names;
    std::size_t skipped = 0;
};

/// Training-side preprocessing: KNN-impute the visit table, min-max fit on
/// this dataset, window into (m, n) samples with the excluded features
/// dropped. Demographics are scaled with their own fitted min/max, appended
/// to the stored scaler after the features.
PreparedTraining prepare_training_data(const Dataset& ds, std::size_t m, std::size_t n,
                                       const std::vector<std::string>& exclude_features,
                                       std::size_t knn_k);

/// Apply-side preprocessing against already-fitted metadata: impute, map the
/// wanted feature columns by name, apply the combined scaler (features then
/// demographics), window into (m, n) samples. An empty demographic name list
/// drops the dataset's demographics entirely.
std::vector<WindowedSample> prepare_windows(const Dataset& ds, const Scaler& combined_scaler,
                                            const std::vector<std::string>& feature_names,
                                            const std::vector<std::string>& demographic_names,
                                            std::size_t m, std::size_t n, std::size_t knn_k);

/// Evaluation-side preprocessing: impute, then apply the scaler persisted in
/// the model artifact, matching feature columns by name; windows use the
/// model's training scenario.
std::vector<WindowedSample> prepare_eval_data(const Dataset& ds, const Model& model,
                                              std::size_t knn_k);

} // namespace tarnn
