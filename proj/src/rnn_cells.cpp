#include "tarnn/rnn_cells.hpp"

#include <cmath>

#include "tarnn/errors.hpp"

namespace tarnn {

const char* to_string(CellKind k) {
    switch (k) {
    case CellKind::LSTM: return "lstm";
    case CellKind::GRU: return "gru";
    case CellKind::BiLSTM: return "bilstm";
    case CellKind::BiGRU: return "bigru";
    }
    return "?";
}

CellKind cell_kind_from_string(const std::string& s) {
    if (s == "lstm")
        return CellKind::LSTM;
    if (s == "gru")
        return CellKind::GRU;
    if (s == "bilstm" || s == "bi-lstm")
        return CellKind::BiLSTM;
    if (s == "bigru" || s == "bi-gru")
        return CellKind::BiGRU;
    throw ConfigError("unknown cell kind '" + s + "' (lstm, gru, bilstm, bigru)");
}

bool is_bidirectional(CellKind k) { return k == CellKind::BiLSTM || k == CellKind::BiGRU; }

CellKind unidirectional(CellKind k) {
    if (k == CellKind::BiLSTM)
        return CellKind::LSTM;
    if (k == CellKind::BiGRU)
        return CellKind::GRU;
    return k;
}

void CellConfig::validate() const {
    if (input_size == 0 || hidden_size == 0)
        throw ConfigError("cell sizes must be positive (input=" + std::to_string(input_size) +
                          ", hidden=" + std::to_string(hidden_size) + ")");
}

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& v : t.mutable_values())
        v = dist(rng);
    return t;
}

std::vector<GateParams> init_direction(const CellConfig& cfg, std::mt19937_64& rng) {
    const std::size_t h = cfg.hidden_size, in = cfg.input_size;
    const double wb = 1.0 / std::sqrt(static_cast<double>(in));
    const double ub = 1.0 / std::sqrt(static_cast<double>(h));
    const bool lstm = unidirectional(cfg.kind) == CellKind::LSTM;
    const std::size_t n_gates = lstm ? 4 : 3;
    std::vector<GateParams> gates;
    gates.reserve(n_gates);
    for (std::size_t gi = 0; gi < n_gates; ++gi) {
        GateParams g;
        g.W = uniform_tensor({h, in}, wb, rng);
        g.U = uniform_tensor({h, h}, ub, rng);
        const double bias = (lstm && gi == 1) ? 1.0 : 0.0; // forget gate
        g.b = Tensor::full({h}, bias, true);
        gates.push_back(std::move(g));
    }
    return gates;
}

Tensor gate_preact(const GateParams& g, const Tensor& x, const Tensor& h) {
    return add(add(matvec(g.W, x), matvec(g.U, h)), g.b);
}

void check_step_shapes(const Tensor& x, const Tensor& h, const std::vector<GateParams>& gates,
                       const char* what) {
    const auto& g = gates.at(0);
    if (x.rank() != 1 || h.rank() != 1 || g.W.cols() != x.numel() || g.U.cols() != h.numel())
        throw DimensionError(std::string(what) + ": input " + shape_str(x.shape()) + " / state " +
                             shape_str(h.shape()) + " do not match gate weights " +
                             shape_str(g.W.shape()));
}

} // namespace

CellParams init_cell_params(const CellConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    CellParams p;
    p.fwd = init_direction(cfg, rng);
    if (is_bidirectional(cfg.kind))
        p.bwd = init_direction(cfg, rng);
    return p;
}

Tensor gru_step(const Tensor& x, const Tensor& h, const std::vector<GateParams>& gates) {
    if (gates.size() != 3)
        throw ContractError("gru_step: expected 3 gate parameter sets");
    check_step_shapes(x, h, gates, "gru_step");
    Tensor z = sigmoid(gate_preact(gates[0], x, h));
    Tensor r = sigmoid(gate_preact(gates[1], x, h));
    Tensor n = tanh_act(add(add(matvec(gates[2].W, x), matvec(gates[2].U, mul(r, h))), gates[2].b));
    Tensor one_minus_z = sub(Tensor::full({z.numel()}, 1.0), z);
    return add(mul(one_minus_z, n), mul(z, h));
}

std::pair<Tensor, Tensor> lstm_step(const Tensor& x, const Tensor& h, const Tensor& c,
                                    const std::vector<GateParams>& gates) {
    if (gates.size() != 4)
        throw ContractError("lstm_step: expected 4 gate parameter sets");
    check_step_shapes(x, h, gates, "lstm_step");
    Tensor i = sigmoid(gate_preact(gates[0], x, h));
    Tensor f = sigmoid(gate_preact(gates[1], x, h));
    Tensor g = tanh_act(gate_preact(gates[2], x, h));
    Tensor o = sigmoid(gate_preact(gates[3], x, h));
    Tensor c_next = add(mul(f, c), mul(i, g));
    Tensor h_next = mul(o, tanh_act(c_next));
    return {h_next, c_next};
}

namespace {

std::vector<Tensor> scan(const Tensor& z, const CellConfig& cfg,
                         const std::vector<GateParams>& gates, bool reverse) {
    const std::size_t t_len = z.rows();
    const bool lstm = unidirectional(cfg.kind) == CellKind::LSTM;
    Tensor h = Tensor::zeros({cfg.hidden_size});
    Tensor c = Tensor::zeros({cfg.hidden_size});
    std::vector<Tensor> states(t_len);
    for (std::size_t step = 0; step < t_len; ++step) {
        const std::size_t t = reverse ? t_len - 1 - step : step;
        Tensor x = row(z, t);
        if (lstm) {
            auto [hn, cn] = lstm_step(x, h, c, gates);
            h = hn;
            c = cn;
        } else {
            h = gru_step(x, h, gates);
        }
        states[t] = h;
    }
    return states;
}

} // namespace

Tensor run_rnn(const Tensor& z, const CellConfig& cfg, const CellParams& params) {
    cfg.validate();
    if (z.rank() != 2 || z.cols() != cfg.input_size)
        throw DimensionError("run_rnn: input " + shape_str(z.shape()) +
                             " does not match configured input size " +
                             std::to_string(cfg.input_size));
    if (z.rows() == 0)
        throw ContractError("run_rnn: empty sequence");

    std::vector<Tensor> fwd = scan(z, cfg, params.fwd, false);
    if (!is_bidirectional(cfg.kind))
        return stack_rows(fwd);

    if (params.bwd.empty())
        throw ContractError("run_rnn: bidirectional cell has no backward parameters");
    std::vector<Tensor> bwd = scan(z, cfg, params.bwd, true);
    std::vector<Tensor> joined(fwd.size());
    for (std::size_t t = 0; t < fwd.size(); ++t)
        joined[t] = concat(fwd[t], bwd[t]);
    return stack_rows(joined);
}

} // namespace tarnn
