#include "tarnn/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tarnn/errors.hpp"

namespace tarnn {

using nlohmann::json;

namespace {
constexpr int kArtifactVersion = 1;
constexpr const char* kArtifactName = "tarnn-model";
} // namespace

const char* to_string(Variant v) {
    switch (v) {
    case Variant::TA_RNN: return "ta-rnn";
    case Variant::TA_RNN_AE: return "ta-rnn-ae";
    case Variant::A_RNN: return "a-rnn";
    case Variant::T_RNN: return "t-rnn";
    case Variant::A_RNN_AE: return "a-rnn-ae";
    case Variant::T_RNN_AE: return "t-rnn-ae";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "ta-rnn")
        return Variant::TA_RNN;
    if (s == "ta-rnn-ae")
        return Variant::TA_RNN_AE;
    if (s == "a-rnn")
        return Variant::A_RNN;
    if (s == "t-rnn")
        return Variant::T_RNN;
    if (s == "a-rnn-ae")
        return Variant::A_RNN_AE;
    if (s == "t-rnn-ae")
        return Variant::T_RNN_AE;
    throw ConfigError("unknown variant '" + s +
                      "' (ta-rnn, ta-rnn-ae, a-rnn, t-rnn, a-rnn-ae, t-rnn-ae)");
}

bool has_time_embedding(Variant v) { return v != Variant::A_RNN && v != Variant::A_RNN_AE; }
bool has_attention(Variant v) { return v != Variant::T_RNN && v != Variant::T_RNN_AE; }
bool is_autoencoder(Variant v) {
    return v == Variant::TA_RNN_AE || v == Variant::A_RNN_AE || v == Variant::T_RNN_AE;
}

void ModelConfig::validate() const {
    if (d_model == 0 || feature_count == 0)
        throw ConfigError("model: d_model and feature_count must be positive");
    if (mlp_hidden == 0)
        throw ConfigError("model: mlp_hidden must be positive");
    if (cell.input_size != d_model)
        throw ConfigError("model: cell input size must equal d_model");
    cell.validate();
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ConfigError("model: dropout_rate must lie in [0, 1)");
    if (l2_lambda < 0.0)
        throw ConfigError("model: l2_lambda must be non-negative");
    if (is_autoencoder(variant)) {
        if (horizon < 1)
            throw ConfigError("model: autoencoder variants need horizon n >= 1");
    } else if (horizon != 1) {
        throw ConfigError("model: variant " + std::string(to_string(variant)) +
                          " predicts the next visit; horizon must be 1");
    }
}

namespace {

const char* gru_gate_names[] = {"z", "r", "n"};
const char* lstm_gate_names[] = {"i", "f", "g", "o"};

void collect_gates(std::vector<NamedParam>& out, const std::string& prefix, CellKind kind,
                   const std::vector<GateParams>& gates) {
    const char** names = unidirectional(kind) == CellKind::LSTM ? lstm_gate_names : gru_gate_names;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        out.push_back({prefix + "." + names[i] + ".W", gates[i].W, false});
        out.push_back({prefix + "." + names[i] + ".U", gates[i].U, false});
        out.push_back({prefix + "." + names[i] + ".b", gates[i].b, true});
    }
}

Tensor uniform_init(std::vector<std::size_t> shape, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& v : t.mutable_values())
        v = dist(rng);
    return t;
}

} // namespace

std::vector<NamedParam> Model::named_params() const {
    std::vector<NamedParam> out;
    if (params.input_proj)
        out.push_back({"input_proj", *params.input_proj, false});
    collect_gates(out, "encoder.fwd", cfg.cell.kind, params.encoder.fwd);
    if (!params.encoder.bwd.empty())
        collect_gates(out, "encoder.bwd", cfg.cell.kind, params.encoder.bwd);
    if (params.attention) {
        out.push_back({"attention.w_alpha", params.attention->w_alpha, false});
        out.push_back({"attention.b_alpha", params.attention->b_alpha, true});
        out.push_back({"attention.W_beta", params.attention->W_beta, false});
        out.push_back({"attention.b_beta", params.attention->b_beta, true});
    }
    if (params.trnn_adapter_w) {
        out.push_back({"adapter.W", *params.trnn_adapter_w, false});
        out.push_back({"adapter.b", *params.trnn_adapter_b, true});
    }
    if (params.decoder)
        collect_gates(out, "decoder", unidirectional(cfg.cell.kind), params.decoder->fwd);
    out.push_back({"mlp.W2", params.mlp_w2, false});
    out.push_back({"mlp.b2", params.mlp_b2, true});
    out.push_back({"mlp.W1", params.mlp_w1, false});
    out.push_back({"mlp.b1", params.mlp_b1, true});
    return out;
}

Model init_model(const ModelConfig& cfg, TimeUnit unit, std::vector<std::string> feature_names,
                 std::vector<std::string> demographic_names, Scaler scaler, std::size_t window_m,
                 double et_max, std::mt19937_64& rng) {
    cfg.validate();
    if (!(et_max > 0.0))
        throw ConfigError("model: et_max must be positive");
    if (feature_names.size() != cfg.feature_count)
        throw ConfigError("model: feature name list size does not match feature_count");
    if (demographic_names.size() != cfg.demographic_size)
        throw ConfigError("model: demographic name list size does not match demographic_size");

    Model m;
    m.cfg = cfg;
    m.unit = unit;
    m.feature_names = std::move(feature_names);
    m.demographic_names = std::move(demographic_names);
    m.scaler = std::move(scaler);
    m.window_m = window_m;
    m.params.te = {cfg.d_model, et_max};

    if (cfg.feature_count != cfg.d_model)
        m.params.input_proj = uniform_init({cfg.feature_count, cfg.d_model},
                                           1.0 / std::sqrt((double)cfg.feature_count), rng);
    m.params.encoder = init_cell_params(cfg.cell, rng);
    const std::size_t width = cfg.cell.output_width();
    if (has_attention(cfg.variant)) {
        m.params.attention = init_attention_params(width, cfg.d_model, rng);
    } else if (width != cfg.d_model) {
        m.params.trnn_adapter_w =
            uniform_init({cfg.d_model, width}, 1.0 / std::sqrt((double)width), rng);
        m.params.trnn_adapter_b = Tensor::zeros({cfg.d_model}, true);
    }
    if (is_autoencoder(cfg.variant)) {
        CellConfig dec{unidirectional(cfg.cell.kind), cfg.d_model, cfg.d_model};
        m.params.decoder = init_cell_params(dec, rng);
    }
    const std::size_t head_in = cfg.d_model + cfg.demographic_size;
    m.params.mlp_w2 = uniform_init({cfg.mlp_hidden, head_in}, 1.0 / std::sqrt((double)head_in), rng);
    m.params.mlp_b2 = Tensor::zeros({cfg.mlp_hidden}, true);
    m.params.mlp_w1 = uniform_init({cfg.mlp_hidden}, 1.0 / std::sqrt((double)cfg.mlp_hidden), rng);
    m.params.mlp_b1 = Tensor::scalar(0.0, true);
    return m;
}

std::vector<Tensor> decode(const Tensor& c, std::size_t n, CellKind kind,
                           const std::vector<GateParams>& gates) {
    if (n < 1)
        throw ContractError("decode: horizon must be at least 1");
    if (is_bidirectional(kind))
        throw ConfigError("decode: autoregressive decoding requires a unidirectional cell");
    const bool lstm = kind == CellKind::LSTM;
    Tensor h = c;
    Tensor cell_state = Tensor::zeros({c.numel()});
    Tensor input = c;
    std::vector<Tensor> outputs;
    outputs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (lstm) {
            auto [hn, cn] = lstm_step(input, h, cell_state, gates);
            h = hn;
            cell_state = cn;
        } else {
            h = gru_step(input, h, gates);
        }
        outputs.push_back(h);
        input = h;
    }
    return outputs;
}

namespace {

struct ForwardPieces {
    Tensor z;
    Tensor h;
    Tensor alpha; // undefined for T- variants
    Tensor beta;
    Tensor context;
};

ForwardPieces run_encoder(const Model& model, const std::vector<std::vector<double>>& x,
                          const ElapsedTimes& e) {
    const ModelConfig& cfg = model.cfg;
    if (e.unit != model.unit)
        throw DataError(std::string("elapsed-time unit '") + to_string(e.unit) +
                        "' does not match the model's unit '" + to_string(model.unit) + "'");
    e.validate();
    ForwardPieces p;
    p.z = has_time_embedding(cfg.variant)
              ? embed_sequence(x, e, model.params.te, model.params.input_proj)
              : project_sequence(x, cfg.d_model, model.params.input_proj);
    p.h = run_rnn(p.z, cfg.cell, model.params.encoder);
    if (has_attention(cfg.variant)) {
        p.alpha = visit_attention(p.h, *model.params.attention);
        p.beta = feature_attention(p.h, *model.params.attention);
        p.context = context_vector(p.alpha, p.beta, p.z);
    } else {
        Tensor last = row(p.h, p.h.rows() - 1);
        if (model.params.trnn_adapter_w)
            p.context = add(matvec(*model.params.trnn_adapter_w, last), *model.params.trnn_adapter_b);
        else
            p.context = last;
    }
    return p;
}

} // namespace

Tensor forward_sample(const Model& model, const std::vector<std::vector<double>>& x,
                      const ElapsedTimes& e, const std::vector<double>& demographics,
                      bool training, std::mt19937_64* rng) {
    const ModelConfig& cfg = model.cfg;
    if (demographics.size() != cfg.demographic_size)
        throw DataError("sample has " + std::to_string(demographics.size()) +
                        " demographics, model expects " + std::to_string(cfg.demographic_size));

    ForwardPieces pieces = run_encoder(model, x, e);

    Tensor head_in = pieces.context;
    if (is_autoencoder(cfg.variant)) {
        auto outputs = decode(pieces.context, cfg.horizon, unidirectional(cfg.cell.kind),
                              model.params.decoder->fwd);
        head_in = outputs.back();
    }
    if (cfg.demographic_size > 0)
        head_in = concat(head_in, Tensor::vector(demographics));

    Tensor hidden = relu(add(matvec(model.params.mlp_w2, head_in), model.params.mlp_b2));
    if (training && cfg.dropout_rate > 0.0) {
        if (!rng)
            throw ContractError("forward_sample: training with dropout requires an rng");
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double keep = 1.0 - cfg.dropout_rate;
        Tensor mask = Tensor::zeros({hidden.numel()});
        for (double& v : mask.mutable_values())
            v = u(*rng) < keep ? 1.0 / keep : 0.0;
        hidden = mul(hidden, mask);
    }
    return sigmoid(add(dot(model.params.mlp_w1, hidden), model.params.mlp_b1));
}

Tensor forward_sample(const Model& model, const WindowedSample& s, bool training,
                      std::mt19937_64* rng) {
    return forward_sample(model, s.x, s.e, s.demographics, training, rng);
}

std::vector<double> predict_scores(const Model& model, const std::vector<WindowedSample>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        out.push_back(forward_sample(model, s).value());
    return out;
}

AttentionReport explain(const Model& model, const WindowedSample& s) {
    if (!has_attention(model.cfg.variant))
        throw ConfigError(std::string("variant ") + to_string(model.cfg.variant) +
                          " has no attention weights to explain");
    ForwardPieces pieces = run_encoder(model, s.x, s.e);
    const std::size_t t = pieces.alpha.numel();
    const std::size_t d = pieces.beta.cols();
    AttentionReport rep;
    rep.alpha.resize(t);
    for (std::size_t j = 0; j < t; ++j)
        rep.alpha[j] = pieces.alpha[j];
    rep.beta.assign(t, std::vector<double>(d));
    rep.combined.assign(t, std::vector<double>(d));
    rep.feature_means.assign(d, 0.0);
    for (std::size_t j = 0; j < t; ++j)
        for (std::size_t f = 0; f < d; ++f) {
            rep.beta[j][f] = pieces.beta.at(j, f);
            rep.combined[j][f] = rep.alpha[j] * rep.beta[j][f];
            rep.feature_means[f] += rep.beta[j][f] / static_cast<double>(t);
        }
    return rep;
}

// --- persistence --------------------------------------------------------------

void save_model(const Model& model, const std::string& path) {
    json params = json::array();
    for (const auto& np : model.named_params()) {
        params.push_back({{"name", np.name},
                          {"shape", np.tensor.shape()},
                          {"bias", np.is_bias},
                          {"values", std::vector<double>(np.tensor.values().begin(),
                                                         np.tensor.values().end())}});
    }
    json doc = {{"format", kArtifactName},
                {"version", kArtifactVersion},
                {"variant", to_string(model.cfg.variant)},
                {"cell", to_string(model.cfg.cell.kind)},
                {"hidden_size", model.cfg.cell.hidden_size},
                {"d_model", model.cfg.d_model},
                {"mlp_hidden", model.cfg.mlp_hidden},
                {"demographic_size", model.cfg.demographic_size},
                {"feature_count", model.cfg.feature_count},
                {"horizon", model.cfg.horizon},
                {"dropout_rate", model.cfg.dropout_rate},
                {"l2_lambda", model.cfg.l2_lambda},
                {"unit", to_string(model.unit)},
                {"et_max", model.params.te.et_max},
                {"window_m", model.window_m},
                {"feature_names", model.feature_names},
                {"demographic_names", model.demographic_names},
                {"scaler", {{"min", model.scaler.min}, {"max", model.scaler.max}}},
                {"params", params}};
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open '" + path + "' for writing");
    out << doc.dump(2) << "\n";
    if (!out)
        throw DataError("write to '" + path + "' failed");
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open model file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("malformed model file '" + path + "': " + e.what());
    }
    try {
        if (doc.value("format", "") != kArtifactName)
            throw DataError("'" + path + "' is not a " + kArtifactName + " artifact");
        if (doc.value("version", -1) != kArtifactVersion)
            throw DataError("unsupported model artifact version in '" + path + "'");

        ModelConfig cfg;
        cfg.variant = variant_from_string(doc.at("variant").get<std::string>());
        cfg.cell.kind = cell_kind_from_string(doc.at("cell").get<std::string>());
        cfg.cell.hidden_size = doc.at("hidden_size").get<std::size_t>();
        cfg.d_model = doc.at("d_model").get<std::size_t>();
        cfg.cell.input_size = cfg.d_model;
        cfg.mlp_hidden = doc.at("mlp_hidden").get<std::size_t>();
        cfg.demographic_size = doc.at("demographic_size").get<std::size_t>();
        cfg.feature_count = doc.at("feature_count").get<std::size_t>();
        cfg.horizon = doc.at("horizon").get<std::size_t>();
        cfg.dropout_rate = doc.at("dropout_rate").get<double>();
        cfg.l2_lambda = doc.at("l2_lambda").get<double>();

        Scaler scaler;
        scaler.min = doc.at("scaler").at("min").get<std::vector<double>>();
        scaler.max = doc.at("scaler").at("max").get<std::vector<double>>();

        std::mt19937_64 rng(0); // placeholder values, overwritten below
        Model m = init_model(cfg, time_unit_from_string(doc.at("unit").get<std::string>()),
                             doc.at("feature_names").get<std::vector<std::string>>(),
                             doc.at("demographic_names").get<std::vector<std::string>>(),
                             std::move(scaler), doc.at("window_m").get<std::size_t>(),
                             doc.at("et_max").get<double>(), rng);

        auto registry = m.named_params();
        const auto& stored = doc.at("params");
        if (stored.size() != registry.size())
            throw DataError("model file '" + path + "' holds " + std::to_string(stored.size()) +
                            " parameter blocks, expected " + std::to_string(registry.size()));
        for (std::size_t i = 0; i < registry.size(); ++i) {
            const auto& block = stored.at(i);
            if (block.at("name").get<std::string>() != registry[i].name)
                throw DataError("model file '" + path + "': unexpected parameter '" +
                                block.at("name").get<std::string>() + "', expected '" +
                                registry[i].name + "'");
            auto values = block.at("values").get<std::vector<double>>();
            if (values.size() != registry[i].tensor.numel())
                throw DataError("model file '" + path + "': parameter '" + registry[i].name +
                                "' has wrong size");
            registry[i].tensor.mutable_values() = std::move(values);
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError("malformed model file '" + path + "': " + e.what());
    }
}

} // namespace tarnn
