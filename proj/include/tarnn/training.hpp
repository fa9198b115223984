#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tarnn/data.hpp"
#include "tarnn/metrics.hpp"
#include "tarnn/model.hpp"

namespace tarnn {

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double delta = 0.7; // positive-class weight of the loss
    double l2_lambda = 0.0;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double loss = 0.0; // mean weighted BCE over the epoch's samples
    std::optional<double> val_f2;
    std::optional<double> val_sensitivity;
    std::optional<double> val_auc;
};

using TrainHistory = std::vector<EpochStats>;

std::string history_to_csv(const TrainHistory& history);

/// Class-weighted binary cross-entropy:
/// -(1/N) sum(delta * y * log y' + (1 - delta) * (1 - y) * log(1 - y')),
/// predictions clamped to [1e-12, 1 - 1e-12] before the logs.
double weighted_bce(std::span<const int> y, std::span<const double> y_hat, double delta);

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::uint64_t step = 0;
};

AdamState init_adam_state(const std::vector<NamedParam>& params);

/// One Adam update over the registered parameters, reading the accumulated
/// gradients. A NaN gradient aborts with the parameter's name.
void adam_step(const std::vector<NamedParam>& params, AdamState& state, const TrainConfig& cfg);

struct EvalResult {
    ConfusionCounts counts;
    double f2 = 0.0;
    double sens = 0.0;
    std::optional<double> auc; // empty when only one class is present
    std::size_t n = 0;
};

EvalResult evaluate_model(const Model& model, const std::vector<WindowedSample>& samples,
                          double threshold = 0.5);

struct TrainResult {
    Model model;
    TrainHistory history;
};

/// Seeded mini-batch training of a freshly initialized model. et_max is taken
/// from the training windows. The final short batch of an epoch is used, not
/// dropped. Identical seeds and data give identical parameter trajectories.
TrainResult train(const std::vector<WindowedSample>& data, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, TimeUnit unit,
                  std::vector<std::string> feature_names,
                  std::vector<std::string> demographic_names, Scaler scaler,
                  const std::vector<WindowedSample>* validation = nullptr);

} // namespace tarnn
