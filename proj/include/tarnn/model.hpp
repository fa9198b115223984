#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tarnn/attention.hpp"
#include "tarnn/data.hpp"
#include "tarnn/rnn_cells.hpp"
#include "tarnn/tensor.hpp"
#include "tarnn/time_embedding.hpp"

namespace tarnn {

enum class Variant { TA_RNN, TA_RNN_AE, A_RNN, T_RNN, A_RNN_AE, T_RNN_AE };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);
bool has_time_embedding(Variant v); // false for the A- ablations
bool has_attention(Variant v);      // false for the T- ablations
bool is_autoencoder(Variant v);

struct ModelConfig {
    Variant variant = Variant::TA_RNN;
    CellConfig cell; // cell.input_size == d_model
    std::size_t d_model = 0;
    std::size_t mlp_hidden = 8;
    std::size_t demographic_size = 0;
    std::size_t feature_count = 0; // longitudinal features after exclusions
    std::size_t horizon = 1;       // n; must be 1 for non-autoencoder variants
    double dropout_rate = 0.0;
    double l2_lambda = 0.0;

    void validate() const;
};

struct ModelParams {
    std::optional<Tensor> input_proj; // [F x d_model], present iff F != d_model
    CellParams encoder;
    std::optional<AttentionParams> attention;
    std::optional<Tensor> trnn_adapter_w; // [d_model x width] when width != d_model
    std::optional<Tensor> trnn_adapter_b; // [d_model]
    std::optional<CellParams> decoder;    // autoencoder variants only
    Tensor mlp_w2; // [mlp_hidden x (d_model + demographic_size)]
    Tensor mlp_b2; // [mlp_hidden]
    Tensor mlp_w1; // [mlp_hidden]
    Tensor mlp_b1; // scalar
    TimeEmbedConfig te;
};

struct NamedParam {
    std::string name;
    Tensor tensor;
    bool is_bias = false; // excluded from L2
};

struct Model {
    ModelConfig cfg;
    ModelParams params;
    TimeUnit unit = TimeUnit::Years;
    std::vector<std::string> feature_names;
    std::vector<std::string> demographic_names;
    Scaler scaler;
    std::size_t window_m = 0; // training scenario window length

    std::vector<NamedParam> named_params() const;
};

Model init_model(const ModelConfig& cfg, TimeUnit unit, std::vector<std::string> feature_names,
                 std::vector<std::string> demographic_names, Scaler scaler, std::size_t window_m,
                 double et_max, std::mt19937_64& rng);

/// Autoregressive decoder rollout: both the input and the initial hidden state
/// of the first step are c; afterwards each step consumes the previous output.
std::vector<Tensor> decode(const Tensor& c, std::size_t n, CellKind kind,
                           const std::vector<GateParams>& gates);

/// Predicted outcome probability in (0, 1) for one visit window. Dropout is
/// active only when `training` is set (an rng must be supplied then).
Tensor forward_sample(const Model& model, const std::vector<std::vector<double>>& x,
                      const ElapsedTimes& e, const std::vector<double>& demographics,
                      bool training = false, std::mt19937_64* rng = nullptr);
Tensor forward_sample(const Model& model, const WindowedSample& s, bool training = false,
                      std::mt19937_64* rng = nullptr);

std::vector<double> predict_scores(const Model& model, const std::vector<WindowedSample>& samples);

struct AttentionReport {
    std::vector<double> alpha;                 // visit weights, length t
    std::vector<std::vector<double>> beta;     // t x d_model feature weights
    std::vector<std::vector<double>> combined; // combined[j][f] = alpha[j] * beta[j][f]
    std::vector<double> feature_means;         // per-feature mean of beta over visits
};

/// Attention weights for one sample; rejects the attention-free T- variants.
AttentionReport explain(const Model& model, const WindowedSample& s);

// Self-describing single-file artifact; reload gives bit-identical predictions.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace tarnn
