#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tarnn/tensor.hpp"

namespace tarnn {

enum class TimeUnit { Years, Days };

const char* to_string(TimeUnit u);
TimeUnit time_unit_from_string(const std::string& s);

/// Elapsed times for one visit sequence. The first entry is always zero:
/// the first visit has nothing to be elapsed from.
struct ElapsedTimes {
    std::vector<double> values;
    TimeUnit unit = TimeUnit::Years;

    void validate() const;
    std::size_t size() const { return values.size(); }
};

struct TimeEmbedConfig {
    std::size_t d_model = 0;
    double et_max = 0.0; // maximum elapsed time seen in the training split

    void validate() const;
};

/// Sinusoidal embedding of a single elapsed-time value:
/// out[i] = sin(e / et_max^(2i/d_model)) for even i, cos(...) for odd i.
/// Deterministic, no trainable parameters.
std::vector<double> time_embed(double e, const TimeEmbedConfig& cfg);

/// Z = project(X) + TE, row by row. `proj` ([F x d_model]) must be present
/// exactly when the feature count differs from d_model; with F == d_model the
/// projection is the identity. X enters the graph as a constant; gradients
/// flow through `proj` when it is used.
Tensor embed_sequence(const std::vector<std::vector<double>>& x, const ElapsedTimes& e,
                      const TimeEmbedConfig& cfg, const std::optional<Tensor>& proj);

/// Same input path as embed_sequence but without the time-embedding addition
/// (the "A-" ablation variants).
Tensor project_sequence(const std::vector<std::vector<double>>& x, std::size_t d_model,
                        const std::optional<Tensor>& proj);

} // namespace tarnn
