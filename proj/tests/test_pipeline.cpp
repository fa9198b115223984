#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "tarnn/errors.hpp"
#include "tarnn/pipeline.hpp"
#include "tarnn/training.hpp"

using namespace tarnn;

namespace {

Dataset tiny_dataset() {
    Dataset ds;
    ds.unit = TimeUnit::Years;
    ds.feature_names = {"age", "cog", "lab"};
    ds.demographic_names = {"apoe"};
    for (int i = 0; i < 6; ++i) {
        PatientRecord p;
        p.id = "p" + std::to_string(i);
        p.demographics = {i * 1.0};
        for (int t = 0; t < 5; ++t) {
            Visit v;
            v.features = {60.0 + t, 0.1 * i + t, 5.0 * i};
            v.elapsed = t == 0 ? 0.0 : 1.0;
            v.label = t == 4 && i % 2 == 0 ? 1 : 0;
            p.visits.push_back(v);
        }
        ds.patients.push_back(p);
    }
    return ds;
}

} // namespace

TEST_CASE("training preparation scales into [0,1] and stores a combined scaler") {
    Dataset ds = tiny_dataset();
    ds.patients[0].visits[1].features[1] = std::numeric_limits<double>::quiet_NaN();
    PreparedTraining prep = prepare_training_data(ds, 3, 2, {"age"}, 2);

    CHECK(prep.feature_names == std::vector<std::string>{"cog", "lab"});
    CHECK(prep.scaler.min.size() == 3); // 2 kept features + 1 demographic
    REQUIRE(prep.samples.size() == 6);
    for (const auto& s : prep.samples) {
        CHECK(s.x.size() == 3);
        CHECK(s.x[0].size() == 2);
        for (const auto& row : s.x)
            for (double v : row) {
                CHECK_FALSE(std::isnan(v));
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        const int patient_index = s.patient_id[1] - '0';
        CHECK(s.label == (patient_index % 2 == 0 ? 1 : 0)); // visit 5 labels
    }
}

TEST_CASE("evaluation windows match feature columns by name, not position") {
    Dataset train_ds = tiny_dataset();
    PreparedTraining prep = prepare_training_data(train_ds, 2, 1, {"age"}, 2);

    ModelConfig mc;
    mc.variant = Variant::TA_RNN;
    mc.d_model = 2;
    mc.cell = {CellKind::GRU, 2, 3};
    mc.demographic_size = 1;
    mc.feature_count = 2;
    TrainConfig tc;
    tc.epochs = 0;
    TrainResult r = train(prep.samples, mc, tc, train_ds.unit, prep.feature_names,
                          prep.demographic_names, prep.scaler);

    // same content, columns permuted
    Dataset swapped = tiny_dataset();
    swapped.feature_names = {"lab", "age", "cog"};
    for (auto& p : swapped.patients)
        for (auto& v : p.visits)
            v.features = {v.features[2], v.features[0], v.features[1]};

    auto straight = prepare_eval_data(train_ds, r.model, 2);
    auto permuted = prepare_eval_data(swapped, r.model, 2);
    REQUIRE(straight.size() == permuted.size());
    for (std::size_t i = 0; i < straight.size(); ++i)
        CHECK(straight[i].x == permuted[i].x);

    Dataset missing = tiny_dataset();
    missing.feature_names = {"age", "cog", "other"};
    CHECK_THROWS_AS(prepare_eval_data(missing, r.model, 2), DataError);

    Dataset wrong_unit = tiny_dataset();
    wrong_unit.unit = TimeUnit::Days;
    CHECK_THROWS_AS(prepare_eval_data(wrong_unit, r.model, 2), DataError);
}

TEST_CASE("empty demographic list drops dataset demographics") {
    Dataset ds = tiny_dataset();
    PreparedTraining prep = prepare_training_data(ds, 2, 1, {}, 2);
    Scaler feature_only{{prep.scaler.min.begin(), prep.scaler.min.begin() + 3},
                        {prep.scaler.max.begin(), prep.scaler.max.begin() + 3}};
    auto windows = prepare_windows(ds, feature_only, prep.feature_names, {}, 2, 1, 2);
    REQUIRE_FALSE(windows.empty());
    for (const auto& w : windows)
        CHECK(w.demographics.empty());
}
