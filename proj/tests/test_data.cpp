#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tarnn/data.hpp"
#include "tarnn/errors.hpp"

using namespace tarnn;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// chi-square statistic of a 2x2 contingency table
double chi2(double a, double b, double c, double d) {
    const double n = a + b + c + d;
    const double num = n * (a * d - b * c) * (a * d - b * c);
    const double den = (a + b) * (c + d) * (a + c) * (b + d);
    return den == 0.0 ? 0.0 : num / den;
}

// Conversion-by-visit-k vs. median split of cumulative elapsed time at k.
double gap_dependence_chi2(const Dataset& ds, std::size_t k) {
    std::vector<double> cumulative;
    std::vector<int> converted;
    for (const auto& p : ds.patients) {
        if (p.visits.size() <= k)
            continue;
        double ct = 0.0;
        for (std::size_t t = 0; t <= k; ++t)
            ct += p.visits[t].elapsed;
        cumulative.push_back(ct);
        converted.push_back(p.visits[k].label);
    }
    std::vector<double> sorted = cumulative;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    double a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        const bool slow = cumulative[i] < median;
        if (converted[i] && slow)
            ++a;
        else if (converted[i])
            ++b;
        else if (slow)
            ++c;
        else
            ++d;
    }
    return chi2(a, b, c, d);
}

} // namespace

TEST_CASE("generator is deterministic and honors basic invariants") {
    GenConfig cfg;
    cfg.patients = 50;
    Dataset d1 = generate_synthetic(cfg, 7);
    Dataset d2 = generate_synthetic(cfg, 7);
    REQUIRE(d1.patients.size() == 50);
    for (std::size_t i = 0; i < d1.patients.size(); ++i) {
        const auto& p1 = d1.patients[i];
        const auto& p2 = d2.patients[i];
        CHECK(p1.id == p2.id);
        REQUIRE(p1.visits.size() == p2.visits.size());
        CHECK(p1.visits.size() >= cfg.min_visits);
        CHECK(p1.visits.size() <= cfg.max_visits);
        CHECK(p1.visits[0].elapsed == 0.0);
        int prev_label = 0;
        for (std::size_t t = 0; t < p1.visits.size(); ++t) {
            CHECK(p1.visits[t].features == p2.visits[t].features);
            CHECK(p1.visits[t].elapsed == p2.visits[t].elapsed);
            if (t > 0) {
                CHECK(p1.visits[t].elapsed >= cfg.gap_min);
                CHECK(p1.visits[t].elapsed <= cfg.gap_max);
            }
            CHECK(p1.visits[t].label >= prev_label); // monotone conversion
            prev_label = p1.visits[t].label;
        }
    }
    CHECK(generate_synthetic(GenConfig{.patients = 0}, 1).patients.empty());
    CHECK(d1.data_card.find("seed=7") != std::string::npos);
}

TEST_CASE("conversion is independent of gaps when the time hazard is off") {
    GenConfig cfg;
    cfg.patients = 600;
    cfg.hazard_time = 0.0;
    cfg.hazard_severity = 3.0;
    cfg.hazard_bias = -3.0;
    Dataset ds = generate_synthetic(cfg, 100);
    CHECK(gap_dependence_chi2(ds, 3) < 6.63); // chi2 critical value, p = 0.01

    GenConfig dep = cfg;
    dep.hazard_time = 2.0;
    dep.hazard_bias = -5.0;
    Dataset ds2 = generate_synthetic(dep, 100);
    CHECK(gap_dependence_chi2(ds2, 3) > 6.63);
}

TEST_CASE("knn imputation") {
    SUBCASE("table without missing values is untouched") {
        std::vector<std::vector<double>> t = {{1, 2}, {3, 4}};
        auto copy = t;
        knn_impute(t, 2);
        CHECK(t == copy);
    }
    SUBCASE("missing cell among identical rows takes the shared value") {
        std::vector<std::vector<double>> t = {{1, 5}, {1, 5}, {1, kNaN}};
        knn_impute(t, 2);
        CHECK(t[2][1] == 5.0);
    }
    SUBCASE("k=1 copies the nearest row's value (brute-force verified)") {
        std::vector<std::vector<double>> t = {{0.0, 10.0}, {4.9, 20.0}, {5.0, kNaN}};
        // distances from row 2 over the co-observed column 0: 5.0 vs 0.1
        knn_impute(t, 1);
        CHECK(t[2][1] == 20.0);
    }
    SUBCASE("observed cells stay untouched") {
        std::vector<std::vector<double>> t = {{1.0, kNaN, 3.0}, {2.0, 7.0, kNaN}, {1.5, 8.0, 2.0}};
        knn_impute(t, 1);
        CHECK(t[0][0] == 1.0);
        CHECK(t[1][1] == 7.0);
        CHECK(t[2][2] == 2.0);
        CHECK_FALSE(std::isnan(t[0][1]));
        CHECK_FALSE(std::isnan(t[1][2]));
    }
    SUBCASE("fully missing column is a data error naming the column") {
        std::vector<std::vector<double>> t = {{1.0, kNaN}, {2.0, kNaN}};
        try {
            knn_impute(t, 1);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("column 1") != std::string::npos);
        }
    }
}

TEST_CASE("min-max scaling") {
    std::vector<std::vector<double>> train = {{0.0, 3.0}, {5.0, 3.0}, {10.0, 3.0}};
    Scaler s = fit_scaler(train);
    auto t = train;
    apply_scaler(s, t);
    CHECK(t[0][0] == 0.0);
    CHECK(t[1][0] == 0.5);
    CHECK(t[2][0] == 1.0);
    for (const auto& row : t)
        CHECK(row[1] == 0.0); // constant column convention

    // outside the training range: no clipping
    CHECK(s.transform_row({12.0, 3.0})[0] == doctest::Approx(1.2));

    // inverse transform round-trip for the non-constant column
    for (double x : {-3.0, 0.0, 4.2, 10.0, 17.5}) {
        auto fwd = s.transform_row({x, 3.0});
        CHECK(s.inverse_row(fwd)[0] == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("windowing") {
    Dataset ds;
    ds.unit = TimeUnit::Years;
    ds.feature_names = {"age", "score"};
    ds.demographic_names = {"apoe"};
    auto mk_patient = [&](const std::string& id, std::size_t visits) {
        PatientRecord p;
        p.id = id;
        p.demographics = {1.0};
        for (std::size_t t = 0; t < visits; ++t) {
            Visit v;
            v.features = {60.0 + t, 10.0 * t};
            v.elapsed = t == 0 ? 0.0 : 1.0 + 0.1 * t;
            v.label = t >= visits - 1 ? 1 : 0;
            p.visits.push_back(v);
        }
        return p;
    };
    ds.patients.push_back(mk_patient("p7", 7));
    ds.patients.push_back(mk_patient("p3", 3));
    ds.patients.push_back(mk_patient("p5", 5));

    SUBCASE("m=6, n=1 labels from visit 7 and skips short patients") {
        WindowResult r = window_dataset(ds, 6, 1);
        REQUIRE(r.samples.size() == 1);
        CHECK(r.skipped == 2);
        CHECK(r.samples[0].patient_id == "p7");
        CHECK(r.samples[0].label == 1);
        CHECK(r.samples[0].x.size() == 6);
        CHECK(r.samples[0].e.values[0] == 0.0);
    }
    SUBCASE("m=2, n=2 labels from visit 4") {
        WindowResult r = window_dataset(ds, 2, 2);
        REQUIRE(r.samples.size() == 2); // p7 and p5
        for (const auto& s : r.samples) {
            CHECK(s.x.size() == 2);
            CHECK(s.label == (s.patient_id == "p5" ? 0 : 0)); // visit 4 of either is not last
        }
    }
    SUBCASE("feature exclusion drops the column by name") {
        WindowResult r = window_dataset(ds, 2, 1, {"age"});
        REQUIRE(r.feature_names == std::vector<std::string>{"score"});
        CHECK(r.samples[0].x[1][0] == 10.0);
    }
    SUBCASE("label visit features never leak into X") {
        Dataset probe = ds;
        const double sentinel = 1e9;
        for (auto& p : probe.patients)
            for (std::size_t t = 3; t < p.visits.size(); ++t) // visits beyond m=3 window
                p.visits[t].features.assign(2, sentinel);
        WindowResult r = window_dataset(probe, 3, 1);
        for (const auto& s : r.samples)
            for (const auto& rowv : s.x)
                for (double x : rowv)
                    CHECK(x != sentinel);
    }
    SUBCASE("contract errors") {
        CHECK_THROWS_AS(window_dataset(ds, 1, 1), ContractError);
        CHECK_THROWS_AS(window_dataset(ds, 2, 0), ContractError);
    }
}

TEST_CASE("dataset save/load round-trips losslessly, missing markers included") {
    GenConfig cfg;
    cfg.patients = 12;
    cfg.missing_rate = 0.2;
    Dataset ds = generate_synthetic(cfg, 99);
    const std::string path = temp_path("tarnn_test_ds.jsonl");
    save_dataset(ds, path);
    Dataset back = load_dataset(path);

    CHECK(back.unit == ds.unit);
    CHECK(back.feature_names == ds.feature_names);
    CHECK(back.demographic_names == ds.demographic_names);
    REQUIRE(back.patients.size() == ds.patients.size());
    for (std::size_t i = 0; i < ds.patients.size(); ++i) {
        const auto& a = ds.patients[i];
        const auto& b = back.patients[i];
        CHECK(a.id == b.id);
        CHECK(a.demographics == b.demographics);
        REQUIRE(a.visits.size() == b.visits.size());
        for (std::size_t t = 0; t < a.visits.size(); ++t) {
            CHECK(a.visits[t].elapsed == b.visits[t].elapsed);
            CHECK(a.visits[t].label == b.visits[t].label);
            for (std::size_t f = 0; f < a.visits[t].features.size(); ++f) {
                if (std::isnan(a.visits[t].features[f]))
                    CHECK(std::isnan(b.visits[t].features[f]));
                else
                    CHECK(a.visits[t].features[f] == b.visits[t].features[f]);
            }
        }
    }

    // identical generator inputs give byte-identical files
    const std::string path2 = temp_path("tarnn_test_ds2.jsonl");
    save_dataset(generate_synthetic(cfg, 99), path2);
    CHECK(slurp(path) == slurp(path2));
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("dataset loader rejects bad files with location info") {
    const std::string path = temp_path("tarnn_test_bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"schema":"tarnn-dataset","version":99,"unit":"years","features":[],"demographics":[]})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("version"), DataError);
    {
        std::ofstream out(path);
        out << R"({"schema":"tarnn-dataset","version":1,"features":["a"],"demographics":[]})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("unit"), DataError);
    {
        std::ofstream out(path);
        out << R"({"schema":"tarnn-dataset","version":1,"unit":"years","features":["a"],"demographics":[]})"
            << "\n";
        out << "{not json}\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("line 2"), DataError);
    std::remove(path.c_str());
}
