#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tarnn/errors.hpp"
#include "tarnn/rnn_cells.hpp"

using namespace tarnn;

namespace {

// Zeroed parameter set with the right shapes for hand-constructed cases.
std::vector<GateParams> zero_gates(std::size_t n_gates, std::size_t hidden, std::size_t input) {
    std::vector<GateParams> g(n_gates);
    for (auto& gate : g) {
        gate.W = Tensor::zeros({hidden, input}, true);
        gate.U = Tensor::zeros({hidden, hidden}, true);
        gate.b = Tensor::zeros({hidden}, true);
    }
    return g;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

TEST_CASE("gru_step all-zero parameters and inputs give zero state") {
    auto g = zero_gates(3, 2, 3);
    Tensor h = gru_step(Tensor::zeros({3}), Tensor::zeros({2}), g);
    CHECK(h[0] == 0.0);
    CHECK(h[1] == 0.0);
}

TEST_CASE("gru_step saturated update gate carries the previous state through") {
    auto g = zero_gates(3, 2, 2);
    g[0].b.mutable_values() = {50.0, 50.0}; // update gate ~ 1
    Tensor h_prev = Tensor::vector({0.3, -0.7});
    Tensor h = gru_step(Tensor::vector({1.0, 2.0}), h_prev, g);
    CHECK(h[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(h[1] == doctest::Approx(-0.7).epsilon(1e-12));
}

TEST_CASE("gru_step single-unit cell matches the hand-evaluated formula") {
    auto g = zero_gates(3, 1, 1);
    const double wz = 0.5, uz = -0.3, bz = 0.1;
    const double wr = 0.2, ur = 0.4, br = -0.2;
    const double wn = 0.7, un = -0.5, bn = 0.05;
    g[0].W.mutable_values() = {wz};
    g[0].U.mutable_values() = {uz};
    g[0].b.mutable_values() = {bz};
    g[1].W.mutable_values() = {wr};
    g[1].U.mutable_values() = {ur};
    g[1].b.mutable_values() = {br};
    g[2].W.mutable_values() = {wn};
    g[2].U.mutable_values() = {un};
    g[2].b.mutable_values() = {bn};

    const double x = 0.8, h0 = -0.4;
    const double z = sig(wz * x + uz * h0 + bz);
    const double r = sig(wr * x + ur * h0 + br);
    const double n = std::tanh(wn * x + un * (r * h0) + bn);
    const double expected = (1.0 - z) * n + z * h0;

    Tensor h = gru_step(Tensor::vector({x}), Tensor::vector({h0}), g);
    CHECK(h[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("lstm_step zero case and forget-gate carry-through") {
    auto g = zero_gates(4, 2, 2);
    auto [h, c] = lstm_step(Tensor::zeros({2}), Tensor::zeros({2}), Tensor::zeros({2}), g);
    CHECK(h[0] == 0.0);
    CHECK(c[1] == 0.0);

    g[1].b.mutable_values() = {60.0, 60.0};   // forget ~ 1
    g[0].b.mutable_values() = {-60.0, -60.0}; // input ~ 0
    Tensor c_prev = Tensor::vector({0.2, -0.9});
    auto [h2, c2] = lstm_step(Tensor::vector({1.0, -1.0}), Tensor::zeros({2}), c_prev, g);
    CHECK(c2[0] == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(c2[1] == doctest::Approx(-0.9).epsilon(1e-10));
}

TEST_CASE("lstm_step single-unit cell matches the hand-evaluated formula") {
    auto g = zero_gates(4, 1, 1);
    const double p[4][3] = {{0.5, -0.3, 0.1}, {0.2, 0.4, -0.2}, {0.7, -0.5, 0.05}, {0.6, 0.3, 0.0}};
    for (int gi = 0; gi < 4; ++gi) {
        g[gi].W.mutable_values() = {p[gi][0]};
        g[gi].U.mutable_values() = {p[gi][1]};
        g[gi].b.mutable_values() = {p[gi][2]};
    }
    const double x = -0.6, h0 = 0.3, c0 = 0.25;
    const double i = sig(p[0][0] * x + p[0][1] * h0 + p[0][2]);
    const double f = sig(p[1][0] * x + p[1][1] * h0 + p[1][2]);
    const double gg = std::tanh(p[2][0] * x + p[2][1] * h0 + p[2][2]);
    const double o = sig(p[3][0] * x + p[3][1] * h0 + p[3][2]);
    const double c1 = f * c0 + i * gg;
    const double h1 = o * std::tanh(c1);

    auto [h, c] = lstm_step(Tensor::vector({x}), Tensor::vector({h0}), Tensor::vector({c0}), g);
    CHECK(h[0] == doctest::Approx(h1).epsilon(1e-12));
    CHECK(c[0] == doctest::Approx(c1).epsilon(1e-12));
}

TEST_CASE("run_rnn single step equals the cell step, both directions") {
    std::mt19937_64 rng(42);
    CellConfig cfg{CellKind::GRU, 3, 2};
    CellParams p = init_cell_params(cfg, rng);
    Tensor z = Tensor::matrix(1, 3, {0.1, -0.2, 0.3});
    Tensor h = run_rnn(z, cfg, p);
    Tensor manual = gru_step(row(z, 0), Tensor::zeros({2}), p.fwd);
    CHECK(h.rows() == 1);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(h.at(0, i) == manual[i]);

    CellConfig bcfg{CellKind::BiGRU, 3, 2};
    CellParams bp = init_cell_params(bcfg, rng);
    Tensor bh = run_rnn(z, bcfg, bp);
    CHECK(bh.cols() == 4);
    Tensor f = gru_step(row(z, 0), Tensor::zeros({2}), bp.fwd);
    Tensor b = gru_step(row(z, 0), Tensor::zeros({2}), bp.bwd);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(bh.at(0, i) == f[i]);
        CHECK(bh.at(0, 2 + i) == b[i]);
    }
}

TEST_CASE("run_rnn equals manual step chaining bit-exactly for every kind") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (CellKind kind : {CellKind::GRU, CellKind::LSTM, CellKind::BiGRU, CellKind::BiLSTM}) {
        for (std::size_t t_len : {1u, 3u, 5u}) {
            CellConfig cfg{kind, 4, 3};
            CellParams p = init_cell_params(cfg, rng);
            std::vector<double> zv(t_len * 4);
            for (double& v : zv)
                v = dist(rng);
            Tensor z = Tensor::matrix(t_len, 4, zv);
            Tensor h = run_rnn(z, cfg, p);

            const bool lstm = unidirectional(kind) == CellKind::LSTM;
            auto chain = [&](const std::vector<GateParams>& gates, bool reverse) {
                std::vector<Tensor> states(t_len);
                Tensor hh = Tensor::zeros({3});
                Tensor cc = Tensor::zeros({3});
                for (std::size_t s = 0; s < t_len; ++s) {
                    const std::size_t t = reverse ? t_len - 1 - s : s;
                    if (lstm) {
                        auto [hn, cn] = lstm_step(row(z, t), hh, cc, gates);
                        hh = hn;
                        cc = cn;
                    } else {
                        hh = gru_step(row(z, t), hh, gates);
                    }
                    states[t] = hh;
                }
                return states;
            };
            auto fwd = chain(p.fwd, false);
            if (!is_bidirectional(kind)) {
                for (std::size_t t = 0; t < t_len; ++t)
                    for (std::size_t i = 0; i < 3; ++i)
                        CHECK(h.at(t, i) == fwd[t][i]);
            } else {
                auto bwd = chain(p.bwd, true);
                for (std::size_t t = 0; t < t_len; ++t)
                    for (std::size_t i = 0; i < 3; ++i) {
                        CHECK(h.at(t, i) == fwd[t][i]);
                        CHECK(h.at(t, 3 + i) == bwd[t][i]);
                    }
            }
        }
    }
}

TEST_CASE("gradient check on a 2-step, 3-unit cell of each kind") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    for (CellKind kind : {CellKind::GRU, CellKind::LSTM, CellKind::BiGRU, CellKind::BiLSTM}) {
        CellConfig cfg{kind, 2, 3};
        CellParams p = init_cell_params(cfg, rng);
        std::vector<double> zv(2 * 2);
        for (double& v : zv)
            v = dist(rng);
        Tensor z = Tensor::matrix(2, 2, zv);
        std::vector<Tensor> leaves;
        for (auto dir : {&p.fwd, &p.bwd})
            for (auto& gate : *dir) {
                leaves.push_back(gate.W);
                leaves.push_back(gate.U);
                leaves.push_back(gate.b);
            }
        auto f = [&] { return sum(run_rnn(z, cfg, p)); };
        CHECK(grad_check(f, leaves) < 1e-4);
    }
}

TEST_CASE("GRU states stay within [-1, 1] for random weights") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        CellConfig cfg{CellKind::GRU, 3, 4};
        auto gates = zero_gates(3, 4, 3);
        for (auto& gate : gates) {
            for (double& v : gate.W.mutable_values())
                v = dist(rng);
            for (double& v : gate.U.mutable_values())
                v = dist(rng);
            for (double& v : gate.b.mutable_values())
                v = dist(rng);
        }
        CellParams p;
        p.fwd = std::move(gates);
        std::vector<double> zv(6 * 3);
        for (double& v : zv)
            v = dist(rng);
        Tensor h = run_rnn(Tensor::matrix(6, 3, zv), cfg, p);
        for (std::size_t i = 0; i < h.numel(); ++i) {
            CHECK(h[i] <= 1.0);
            CHECK(h[i] >= -1.0);
        }
    }
}

TEST_CASE("run_rnn rejects empty sequences and bad widths") {
    std::mt19937_64 rng(1);
    CellConfig cfg{CellKind::GRU, 3, 2};
    CellParams p = init_cell_params(cfg, rng);
    CHECK_THROWS_AS(run_rnn(Tensor::matrix(0, 3, {}), cfg, p), ContractError);
    CHECK_THROWS_AS(run_rnn(Tensor::matrix(2, 4, std::vector<double>(8, 0.0)), cfg, p),
                    DimensionError);
    CHECK_THROWS_AS(gru_step(Tensor::zeros({5}), Tensor::zeros({2}), p.fwd), DimensionError);
}

TEST_CASE("LSTM forget-gate bias starts at one, other biases at zero") {
    std::mt19937_64 rng(4);
    CellConfig cfg{CellKind::LSTM, 2, 3};
    CellParams p = init_cell_params(cfg, rng);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p.fwd[1].b[i] == 1.0);
        CHECK(p.fwd[0].b[i] == 0.0);
        CHECK(p.fwd[2].b[i] == 0.0);
        CHECK(p.fwd[3].b[i] == 0.0);
    }
}
