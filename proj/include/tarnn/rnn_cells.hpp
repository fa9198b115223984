#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tarnn/tensor.hpp"

namespace tarnn {

enum class CellKind { LSTM, GRU, BiLSTM, BiGRU };

const char* to_string(CellKind k);
CellKind cell_kind_from_string(const std::string& s);
bool is_bidirectional(CellKind k);
// LSTM for BiLSTM, GRU for BiGRU; identity otherwise.
CellKind unidirectional(CellKind k);

struct CellConfig {
    CellKind kind = CellKind::GRU;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;

    std::size_t output_width() const {
        return is_bidirectional(kind) ? 2 * hidden_size : hidden_size;
    }
    void validate() const;
};

// W: [hidden x input], U: [hidden x hidden], b: [hidden]
struct GateParams {
    Tensor W;
    Tensor U;
    Tensor b;
};

// Gate order: GRU {update z, reset r, candidate n};
// LSTM {input i, forget f, cell g, output o}.
struct CellParams {
    std::vector<GateParams> fwd;
    std::vector<GateParams> bwd; // empty unless bidirectional
};

/// Uniform +-1/sqrt(fan_in) weights; zero biases except the LSTM forget gate,
/// which starts at 1.
CellParams init_cell_params(const CellConfig& cfg, std::mt19937_64& rng);

Tensor gru_step(const Tensor& x, const Tensor& h, const std::vector<GateParams>& gates);
std::pair<Tensor, Tensor> lstm_step(const Tensor& x, const Tensor& h, const Tensor& c,
                                    const std::vector<GateParams>& gates);

/// Scans Z ([T x input]) into hidden states H ([T x output_width]) starting
/// from zero states. Bidirectional kinds run an independent reverse scan and
/// concatenate per time step.
Tensor run_rnn(const Tensor& z, const CellConfig& cfg, const CellParams& params);

} // namespace tarnn
