#include "tarnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tarnn/errors.hpp"

namespace tarnn {

namespace {
constexpr double kClampLo = 1e-12;
constexpr double kClampHi = 1.0 - 1e-12;
} // namespace

void TrainConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("training: delta must lie in (0, 1)");
    if (!(learning_rate > 0.0))
        throw ConfigError("training: learning rate must be positive");
    if (batch_size < 1)
        throw ConfigError("training: batch size must be at least 1");
    if (l2_lambda < 0.0)
        throw ConfigError("training: l2_lambda must be non-negative");
}

double weighted_bce(std::span<const int> y, std::span<const double> y_hat, double delta) {
    if (y.empty())
        throw ContractError("weighted_bce: empty input");
    if (y.size() != y_hat.size())
        throw ContractError("weighted_bce: label/prediction size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = std::clamp(y_hat[i], kClampLo, kClampHi);
        total += delta * static_cast<double>(y[i]) * std::log(p) +
                 (1.0 - delta) * (1.0 - static_cast<double>(y[i])) * std::log(1.0 - p);
    }
    return -total / static_cast<double>(y.size());
}

std::string history_to_csv(const TrainHistory& history) {
    const bool with_val = !history.empty() && history.front().val_f2.has_value();
    std::ostringstream os;
    os.precision(12);
    os << "epoch,loss";
    if (with_val)
        os << ",val_f2,val_sensitivity,val_auc";
    os << "\n";
    for (const auto& e : history) {
        os << e.epoch << "," << e.loss;
        if (with_val) {
            os << "," << e.val_f2.value() << "," << e.val_sensitivity.value() << ",";
            if (e.val_auc)
                os << e.val_auc.value();
        }
        os << "\n";
    }
    return os.str();
}

AdamState init_adam_state(const std::vector<NamedParam>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
        s.m.emplace_back(p.tensor.numel(), 0.0);
        s.v.emplace_back(p.tensor.numel(), 0.0);
    }
    return s;
}

void adam_step(const std::vector<NamedParam>& params, AdamState& state, const TrainConfig& cfg) {
    if (state.m.size() != params.size())
        throw ContractError("adam_step: state does not match parameter registry");
    ++state.step;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& values = const_cast<Tensor&>(params[pi].tensor).mutable_values();
        auto& m = state.m[pi];
        auto& v = state.v[pi];
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double g = params[pi].tensor.grad_at(i);
            if (!std::isfinite(g))
                throw NumericError("non-finite gradient in parameter '" + params[pi].name + "'");
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            values[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
        }
    }
}

EvalResult evaluate_model(const Model& model, const std::vector<WindowedSample>& samples,
                          double threshold) {
    EvalResult r;
    r.n = samples.size();
    std::vector<double> scores = predict_scores(model, samples);
    std::vector<int> labels;
    labels.reserve(samples.size());
    for (const auto& s : samples)
        labels.push_back(s.label);
    r.counts = confusion(scores, labels, threshold);
    r.f2 = f_beta(r.counts, 2.0);
    r.sens = sensitivity(r.counts);
    const bool both = (r.counts.tp + r.counts.fn) > 0 && (r.counts.tn + r.counts.fp) > 0;
    if (both)
        r.auc = auc_roc(scores, labels);
    return r;
}

TrainResult train(const std::vector<WindowedSample>& data, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, TimeUnit unit,
                  std::vector<std::string> feature_names,
                  std::vector<std::string> demographic_names, Scaler scaler,
                  const std::vector<WindowedSample>* validation) {
    train_cfg.validate();
    if (data.empty())
        throw DataError("train: no training samples");
    const std::size_t m = data.front().m;
    for (const auto& s : data) {
        if (s.m != m || s.x.size() != m)
            throw DataError("train: mixed window lengths in the training set");
        if (s.e.unit != unit)
            throw DataError("train: sample unit does not match the dataset unit");
    }

    double et_max = 0.0;
    for (const auto& s : data)
        for (double e : s.e.values)
            et_max = std::max(et_max, e);
    if (et_max <= 0.0)
        et_max = 1.0; // degenerate all-zero gaps

    std::mt19937_64 rng(train_cfg.seed);
    Model model = init_model(model_cfg, unit, std::move(feature_names),
                             std::move(demographic_names), std::move(scaler), m, et_max, rng);

    auto registry = model.named_params();
    AdamState adam = init_adam_state(registry);

    TrainHistory history;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss_sum = 0.0;

        for (std::size_t begin = 0; begin < order.size(); begin += train_cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + train_cfg.batch_size);
            const std::size_t nb = end - begin;

            for (auto& np : registry)
                np.tensor.zero_grad();

            Tensor batch_sum = Tensor::scalar(0.0);
            for (std::size_t i = begin; i < end; ++i) {
                const WindowedSample& s = data[order[i]];
                Tensor y_hat = forward_sample(model, s, /*training=*/true, &rng);
                Tensor p = clamp(y_hat, kClampLo, kClampHi);
                Tensor term = s.label == 1
                                  ? scale(log_(p), -train_cfg.delta)
                                  : scale(log_(sub(Tensor::scalar(1.0), p)),
                                          -(1.0 - train_cfg.delta));
                batch_sum = add(batch_sum, term);
            }
            Tensor data_loss = scale(batch_sum, 1.0 / static_cast<double>(nb));
            Tensor loss = data_loss;
            if (train_cfg.l2_lambda > 0.0) {
                Tensor penalty = Tensor::scalar(0.0);
                for (const auto& np : registry)
                    if (!np.is_bias)
                        penalty = add(penalty, sum(mul(np.tensor, np.tensor)));
                loss = add(loss, scale(penalty, train_cfg.l2_lambda));
            }
            if (!std::isfinite(loss.value()))
                throw NumericError("non-finite training loss in epoch " + std::to_string(epoch));

            backward(loss);
            adam_step(registry, adam, train_cfg);
            epoch_loss_sum += data_loss.value() * static_cast<double>(nb);
        }

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.loss = epoch_loss_sum / static_cast<double>(data.size());
        if (validation && !validation->empty()) {
            EvalResult ev = evaluate_model(model, *validation);
            stats.val_f2 = ev.f2;
            stats.val_sensitivity = ev.sens;
            stats.val_auc = ev.auc;
        }
        history.push_back(stats);
    }
    return {std::move(model), std::move(history)};
}

} // namespace tarnn
