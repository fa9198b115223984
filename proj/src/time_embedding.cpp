#include "tarnn/time_embedding.hpp"

#include <cmath>
#include <string>

#include "tarnn/errors.hpp"

namespace tarnn {

const char* to_string(TimeUnit u) { return u == TimeUnit::Years ? "years" : "days"; }

TimeUnit time_unit_from_string(const std::string& s) {
    if (s == "years")
        return TimeUnit::Years;
    if (s == "days")
        return TimeUnit::Days;
    throw DataError("unknown time unit '" + s + "' (expected 'years' or 'days')");
}

void ElapsedTimes::validate() const {
    if (!values.empty() && values[0] != 0.0)
        throw DataError("elapsed times must start at 0, got " + std::to_string(values[0]));
    for (double v : values)
        if (!(v >= 0.0))
            throw DataError("negative or non-finite elapsed time " + std::to_string(v));
}

void TimeEmbedConfig::validate() const {
    if (d_model < 1)
        throw ConfigError("time embedding requires d_model >= 1");
    if (!(et_max > 0.0))
        throw ConfigError("time embedding requires et_max > 0");
}

std::vector<double> time_embed(double e, const TimeEmbedConfig& cfg) {
    cfg.validate();
    if (!(e >= 0.0))
        throw ContractError("time_embed: elapsed time must be non-negative, got " +
                            std::to_string(e));
    std::vector<double> out(cfg.d_model);
    for (std::size_t i = 0; i < cfg.d_model; ++i) {
        const double denom =
            std::pow(cfg.et_max, (2.0 * static_cast<double>(i)) / static_cast<double>(cfg.d_model));
        const double arg = e / denom;
        out[i] = (i % 2 == 0) ? std::sin(arg) : std::cos(arg);
    }
    return out;
}

namespace {

Tensor input_rows(const std::vector<std::vector<double>>& x, std::size_t d_model,
                  const std::optional<Tensor>& proj) {
    if (x.empty())
        throw ContractError("embed_sequence: empty visit sequence");
    const std::size_t f = x[0].size();
    std::vector<double> flat;
    flat.reserve(x.size() * f);
    for (const auto& r : x) {
        if (r.size() != f)
            throw DimensionError("embed_sequence: ragged feature rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    Tensor X = Tensor::matrix(x.size(), f, std::move(flat));
    if (f == d_model) {
        if (proj)
            throw ConfigError("input projection given although feature count equals d_model");
        return X;
    }
    if (!proj)
        throw ConfigError("feature count " + std::to_string(f) + " differs from d_model " +
                          std::to_string(d_model) + " but no input projection is configured");
    if (proj->rank() != 2 || proj->rows() != f || proj->cols() != d_model)
        throw DimensionError("input projection shape " + shape_str(proj->shape()) +
                             " does not map " + std::to_string(f) + " features to d_model " +
                             std::to_string(d_model));
    return matmul(X, *proj);
}

} // namespace

Tensor project_sequence(const std::vector<std::vector<double>>& x, std::size_t d_model,
                        const std::optional<Tensor>& proj) {
    return input_rows(x, d_model, proj);
}

Tensor embed_sequence(const std::vector<std::vector<double>>& x, const ElapsedTimes& e,
                      const TimeEmbedConfig& cfg, const std::optional<Tensor>& proj) {
    if (e.size() != x.size())
        throw DimensionError("embed_sequence: " + std::to_string(x.size()) + " visits but " +
                             std::to_string(e.size()) + " elapsed times");
    Tensor projected = input_rows(x, cfg.d_model, proj);
    std::vector<double> te_flat;
    te_flat.reserve(x.size() * cfg.d_model);
    for (double ev : e.values) {
        auto te = time_embed(ev, cfg);
        te_flat.insert(te_flat.end(), te.begin(), te.end());
    }
    Tensor te = Tensor::matrix(x.size(), cfg.d_model, std::move(te_flat));
    return add(projected, te);
}

} // namespace tarnn
