#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "tarnn/errors.hpp"
#include "tarnn/metrics.hpp"

using namespace tarnn;

namespace {

// O(pos * neg) pair-counting oracle, ties worth one half.
double auc_bruteforce(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0)
            continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0)
                continue;
            ++pairs;
            if (s[i] > s[j])
                wins += 1.0;
            else if (s[i] == s[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

} // namespace

TEST_CASE("confusion counting") {
    std::vector<double> perfect = {0.9, 0.1, 0.8, 0.2};
    std::vector<int> y = {1, 0, 1, 0};
    auto c = confusion(perfect, y);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(c.total() == 4);

    std::vector<double> all_pos = {0.9, 0.9, 0.9};
    std::vector<int> neg = {0, 0, 0};
    auto c2 = confusion(all_pos, neg);
    CHECK(c2.tn == 0);
    CHECK(c2.fp == 3);

    std::vector<double> s = {0.4, 0.6};
    std::vector<int> y2 = {0, 1};
    auto c3 = confusion(s, y2, 0.5);
    CHECK(c3.tp == 1);
    CHECK(c3.tn == 1);

    CHECK_THROWS_AS(confusion({}, {}), ContractError);
}

TEST_CASE("f_beta fixed points and hand values") {
    ConfusionCounts balanced{8, 2, 0, 2}; // P = R = 0.8
    CHECK(f_beta(balanced, 2.0) == doctest::Approx(0.8).epsilon(1e-12));

    ConfusionCounts c{10, 10, 0, 0}; // P = 0.5, R = 1.0
    CHECK(f_beta(c, 2.0) == doctest::Approx(0.833333).epsilon(1e-6));

    ConfusionCounts none{0, 3, 4, 5};
    CHECK(f_beta(none, 2.0) == 0.0);
    CHECK_THROWS_AS(f_beta(balanced, 0.0), ContractError);
}

TEST_CASE("f_beta at beta=1 is the harmonic mean of precision and recall") {
    ConfusionCounts c{6, 3, 5, 2};
    const double p = 6.0 / 9.0, r = 6.0 / 8.0;
    CHECK(f_beta(c, 1.0) == doctest::Approx(2.0 * p * r / (p + r)).epsilon(1e-12));
}

TEST_CASE("sensitivity") {
    CHECK(sensitivity({8, 0, 0, 2}) == doctest::Approx(0.8));
    CHECK(sensitivity({5, 1, 2, 0}) == 1.0);
    CHECK(sensitivity({0, 1, 2, 0}) == 0.0);

    // recall-only limit of f_beta
    ConfusionCounts c{7, 4, 3, 5};
    CHECK(f_beta(c, 1000.0) == doctest::Approx(sensitivity(c)).epsilon(1e-3));
}

TEST_CASE("auc_roc anchors") {
    std::vector<double> sep = {0.1, 0.2, 0.8, 0.9};
    std::vector<int> y = {0, 0, 1, 1};
    CHECK(auc_roc(sep, y) == 1.0);

    std::vector<double> tied = {0.5, 0.5, 0.5, 0.5};
    CHECK(auc_roc(tied, y) == 0.5);

    std::vector<double> four = {0.1, 0.4, 0.35, 0.8};
    std::vector<int> y4 = {0, 0, 1, 1};
    CHECK(auc_roc(four, y4) == 0.75);
    CHECK(auc_bruteforce(four, y4) == 0.75);

    std::vector<double> ones = {0.3, 0.6};
    std::vector<int> single = {1, 1};
    CHECK_THROWS_AS(auc_roc(ones, single), DataError);
}

TEST_CASE("rank-based auc agrees with the pair-counting oracle on random data") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> grid(0, 9);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> s;
        std::vector<int> y;
        for (int i = 0; i < 30; ++i) {
            // quantized scores force plenty of ties
            s.push_back(rep % 2 == 0 ? score(rng) : grid(rng) / 10.0);
            y.push_back(coin(rng));
        }
        y[0] = 1;
        y[1] = 0;
        CHECK(auc_roc(s, y) == doctest::Approx(auc_bruteforce(s, y)).epsilon(1e-12));
    }
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> score(-2.0, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        s.push_back(score(rng));
        y.push_back(coin(rng));
    }
    y[0] = 1;
    y[1] = 0;
    const double base = auc_roc(s, y);
    std::vector<double> warped = s;
    for (double& v : warped)
        v = std::exp(3.0 * v) + 7.0;
    CHECK(auc_roc(warped, y) == doctest::Approx(base).epsilon(1e-12));
}
