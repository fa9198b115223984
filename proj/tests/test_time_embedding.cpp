#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tarnn/errors.hpp"
#include "tarnn/time_embedding.hpp"

using namespace tarnn;

TEST_CASE("time_embed at e=0 alternates sin0/cos0") {
    TimeEmbedConfig cfg{4, 10.0};
    auto v = time_embed(0.0, cfg);
    CHECK(v == std::vector<double>{0.0, 1.0, 0.0, 1.0});
}

TEST_CASE("time_embed matches direct scalar evaluation") {
    TimeEmbedConfig cfg{4, 100.0};
    auto v = time_embed(1.0, cfg);
    CHECK(v[0] == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(std::cos(1.0 / 10.0)).epsilon(1e-12));
    CHECK(v[2] == doctest::Approx(std::sin(1.0 / 100.0)).epsilon(1e-12));
    CHECK(v[3] == doctest::Approx(std::cos(1.0 / 1000.0)).epsilon(1e-12));
    CHECK(v[0] == doctest::Approx(0.841471).epsilon(1e-6));
    CHECK(v[1] == doctest::Approx(0.995004).epsilon(1e-6));
}

TEST_CASE("time_embed is deterministic and bounded") {
    TimeEmbedConfig cfg{6, 7.5};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 30.0); // beyond et_max on purpose
    for (int i = 0; i < 200; ++i) {
        const double e = dist(rng);
        auto a = time_embed(e, cfg);
        auto b = time_embed(e, cfg);
        CHECK(a == b);
        for (double x : a) {
            CHECK(x <= 1.0);
            CHECK(x >= -1.0);
        }
    }
}

TEST_CASE("time_embed injective on the half-step grid") {
    TimeEmbedConfig cfg{2, 10.0};
    std::vector<std::vector<double>> seen;
    for (double e = 0.0; e <= cfg.et_max; e += 0.5)
        seen.push_back(time_embed(e, cfg));
    for (std::size_t i = 0; i < seen.size(); ++i)
        for (std::size_t j = i + 1; j < seen.size(); ++j)
            CHECK(seen[i] != seen[j]);
}

TEST_CASE("time_embed rejects negative elapsed time") {
    TimeEmbedConfig cfg{4, 10.0};
    CHECK_THROWS_AS(time_embed(-0.1, cfg), ContractError);
    CHECK_THROWS_AS(time_embed(1.0, TimeEmbedConfig{0, 10.0}), ConfigError);
    CHECK_THROWS_AS(time_embed(1.0, TimeEmbedConfig{4, 0.0}), ConfigError);
}

TEST_CASE("embed_sequence on zero features returns the time embedding rows") {
    TimeEmbedConfig cfg{4, 10.0};
    std::vector<std::vector<double>> x(3, std::vector<double>(4, 0.0));
    ElapsedTimes e{{0.0, 1.5, 2.0}, TimeUnit::Years};
    Tensor z = embed_sequence(x, e, cfg, std::nullopt);
    for (std::size_t t = 0; t < 3; ++t) {
        auto te = time_embed(e.values[t], cfg);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(z.at(t, i) == te[i]);
    }
}

TEST_CASE("embed_sequence with all-zero elapsed adds the constant TE(0) row") {
    TimeEmbedConfig cfg{4, 10.0};
    std::vector<std::vector<double>> x = {{1, 2, 3, 4}, {5, 6, 7, 8}};
    ElapsedTimes e{{0.0, 0.0}, TimeUnit::Years};
    Tensor z = embed_sequence(x, e, cfg, std::nullopt);
    const double te0[] = {0.0, 1.0, 0.0, 1.0};
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(z.at(t, i) == x[t][i] + te0[i]);
}

TEST_CASE("Z - TE recovers X exactly when F == d_model") {
    TimeEmbedConfig cfg{3, 5.0};
    std::vector<std::vector<double>> x = {{0.25, 0.75, -1.5}, {2.0, 0.125, 9.0}};
    ElapsedTimes e{{0.0, 1.25}, TimeUnit::Years};
    Tensor z = embed_sequence(x, e, cfg, std::nullopt);
    for (std::size_t t = 0; t < 2; ++t) {
        auto te = time_embed(e.values[t], cfg);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(z.at(t, i) - te[i] == x[t][i]);
    }
}

TEST_CASE("sequences with equal X but different E differ wherever E differs") {
    TimeEmbedConfig cfg{4, 10.0};
    std::vector<std::vector<double>> x = {{1, 1, 1, 1}, {2, 2, 2, 2}, {3, 3, 3, 3}};
    ElapsedTimes e1{{0.0, 1.0, 2.0}, TimeUnit::Years};
    ElapsedTimes e2{{0.0, 1.0, 2.5}, TimeUnit::Years};
    Tensor z1 = embed_sequence(x, e1, cfg, std::nullopt);
    Tensor z2 = embed_sequence(x, e2, cfg, std::nullopt);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(z1.at(1, i) == z2.at(1, i));
    }
    bool any_diff = false;
    for (std::size_t i = 0; i < 4; ++i)
        any_diff = any_diff || z1.at(2, i) != z2.at(2, i);
    CHECK(any_diff);
}

TEST_CASE("projection is required exactly when F != d_model") {
    TimeEmbedConfig cfg{4, 10.0};
    std::vector<std::vector<double>> x = {{1, 2}, {3, 4}};
    ElapsedTimes e{{0.0, 1.0}, TimeUnit::Years};
    CHECK_THROWS_AS(embed_sequence(x, e, cfg, std::nullopt), ConfigError);

    Tensor proj = Tensor::matrix(2, 4, std::vector<double>(8, 0.1), true);
    Tensor z = embed_sequence(x, e, cfg, proj);
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 4);

    std::vector<std::vector<double>> square = {{1, 2, 3, 4}};
    ElapsedTimes e1{{0.0}, TimeUnit::Years};
    CHECK_THROWS_AS(embed_sequence(square, e1, cfg, proj), ConfigError);
}

TEST_CASE("gradients flow through the projection") {
    TimeEmbedConfig cfg{3, 10.0};
    std::vector<std::vector<double>> x = {{0.5, -0.25}, {1.0, 2.0}};
    ElapsedTimes e{{0.0, 0.7}, TimeUnit::Years};
    Tensor proj = Tensor::matrix(2, 3, {0.1, -0.2, 0.3, 0.4, 0.5, -0.6}, true);
    auto f = [&] { return sum(sigmoid(embed_sequence(x, e, cfg, proj))); };
    CHECK(grad_check(f, {proj}) < 1e-6);
}
