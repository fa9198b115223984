#include "tarnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tarnn/errors.hpp"

namespace tarnn {

using nlohmann::json;

namespace {
constexpr int kSchemaVersion = 1;
constexpr const char* kSchemaName = "tarnn-dataset";
} // namespace

void PatientRecord::validate(std::size_t n_features, std::size_t n_demographics) const {
    if (visits.size() < 2)
        throw DataError("patient '" + id + "' has fewer than two visits");
    if (visits[0].elapsed != 0.0)
        throw DataError("patient '" + id + "' first visit has non-zero elapsed time");
    for (const auto& v : visits) {
        if (v.features.size() != n_features)
            throw DataError("patient '" + id + "' visit has " + std::to_string(v.features.size()) +
                            " features, expected " + std::to_string(n_features));
        if (!(v.elapsed >= 0.0))
            throw DataError("patient '" + id + "' has a negative elapsed time");
        if (v.label != 0 && v.label != 1)
            throw DataError("patient '" + id + "' has a non-binary label");
    }
    if (demographics.size() != n_demographics)
        throw DataError("patient '" + id + "' demographic vector size mismatch");
}

void GenConfig::validate() const {
    if (features == 0)
        throw ConfigError("generator: features must be positive");
    if (signal_features > features)
        throw ConfigError("generator: signal_features exceeds features");
    if (min_visits < 2 || max_visits < min_visits)
        throw ConfigError("generator: need 2 <= min_visits <= max_visits");
    if (!(gap_min > 0.0) || gap_max < gap_min)
        throw ConfigError("generator: need 0 < gap_min <= gap_max");
    if (!(gap_log_sigma >= 0.0))
        throw ConfigError("generator: gap_log_sigma must be non-negative");
    if (missing_rate < 0.0 || missing_rate >= 1.0)
        throw ConfigError("generator: missing_rate must lie in [0, 1)");
    if (hazard_severity < 0.0 || hazard_time < 0.0)
        throw ConfigError("generator: hazard coefficients must be non-negative");
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string make_data_card(const GenConfig& cfg, std::uint64_t seed) {
    std::ostringstream os;
    os << "synthetic longitudinal EHR cohort\n"
       << "patients=" << cfg.patients << "\n"
       << "features=" << cfg.features << " (signal=" << cfg.signal_features << ")\n"
       << "demographics=" << cfg.demographics << " (independent standard normal)\n"
       << "visits=" << cfg.min_visits << ".." << cfg.max_visits << "\n"
       << "gaps=lognormal(mu=" << cfg.gap_log_mean << ", sigma=" << cfg.gap_log_sigma
       << ") clamped to [" << cfg.gap_min << ", " << cfg.gap_max << "] " << to_string(cfg.unit)
       << "\n"
       << "severity: start~U[0," << cfg.severity_start_max << "], per-visit rate~U["
       << cfg.severity_rate_min << "," << cfg.severity_rate_max << "], noise sd "
       << cfg.severity_noise << "\n"
       << "signal features = severity + N(0," << cfg.feature_noise << "); others N(0,1)\n"
       << "missing_rate=" << cfg.missing_rate << "\n"
       << "conversion hazard = logistic(" << cfg.hazard_bias << " + " << cfg.hazard_severity
       << "*severity + " << cfg.hazard_time << "*cumulative_elapsed); labels monotone\n"
       << "seed=" << seed << "\n";
    return os.str();
}

} // namespace

Dataset generate_synthetic(const GenConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset ds;
    ds.unit = cfg.unit;
    for (std::size_t f = 0; f < cfg.features; ++f)
        ds.feature_names.push_back("feat" + std::to_string(f));
    for (std::size_t d = 0; d < cfg.demographics; ++d)
        ds.demographic_names.push_back("dem" + std::to_string(d));
    ds.data_card = make_data_card(cfg, seed);

    std::uniform_int_distribution<std::size_t> visit_count(cfg.min_visits, cfg.max_visits);
    std::uniform_real_distribution<double> start(0.0, cfg.severity_start_max);
    std::uniform_real_distribution<double> rate(cfg.severity_rate_min, cfg.severity_rate_max);
    std::lognormal_distribution<double> gap(cfg.gap_log_mean, cfg.gap_log_sigma);

    for (std::size_t i = 0; i < cfg.patients; ++i) {
        PatientRecord p;
        p.id = "p" + std::to_string(i);
        for (std::size_t d = 0; d < cfg.demographics; ++d)
            p.demographics.push_back(gauss(rng));

        const std::size_t t_len = visit_count(rng);
        const double r = rate(rng);
        double severity = start(rng);
        double cumulative = 0.0;
        bool converted = false;
        for (std::size_t t = 0; t < t_len; ++t) {
            Visit v;
            v.elapsed = t == 0 ? 0.0 : std::clamp(gap(rng), cfg.gap_min, cfg.gap_max);
            cumulative += v.elapsed;
            if (t > 0)
                severity = std::max(0.0, severity + r + cfg.severity_noise * gauss(rng));
            for (std::size_t f = 0; f < cfg.features; ++f) {
                double x = f < cfg.signal_features ? severity + cfg.feature_noise * gauss(rng)
                                                   : gauss(rng);
                v.features.push_back(x);
            }
            if (!converted) {
                const double hazard = logistic(cfg.hazard_bias + cfg.hazard_severity * severity +
                                               cfg.hazard_time * cumulative);
                converted = unit(rng) < hazard;
            }
            v.label = converted ? 1 : 0;
            p.visits.push_back(std::move(v));
        }
        if (cfg.missing_rate > 0.0)
            for (auto& v : p.visits)
                for (double& x : v.features)
                    if (unit(rng) < cfg.missing_rate)
                        x = std::numeric_limits<double>::quiet_NaN();
        ds.patients.push_back(std::move(p));
    }
    return ds;
}

// --- preprocessing -----------------------------------------------------------

void knn_impute(std::vector<std::vector<double>>& table, std::size_t k) {
    if (k < 1)
        throw ContractError("knn_impute: k must be at least 1");
    if (table.empty())
        return;
    const std::size_t f_count = table[0].size();
    for (const auto& r : table)
        if (r.size() != f_count)
            throw DataError("knn_impute: ragged table");

    for (std::size_t f = 0; f < f_count; ++f) {
        bool any = false;
        for (const auto& r : table)
            if (!std::isnan(r[f])) {
                any = true;
                break;
            }
        if (!any)
            throw DataError("knn_impute: column " + std::to_string(f) + " has no observed values");
    }

    const auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        std::size_t co = 0;
        for (std::size_t f = 0; f < f_count; ++f)
            if (!std::isnan(a[f]) && !std::isnan(b[f])) {
                const double d = a[f] - b[f];
                s += d * d;
                ++co;
            }
        if (co == 0)
            return std::numeric_limits<double>::infinity();
        return std::sqrt(s * static_cast<double>(f_count) / static_cast<double>(co));
    };

    // distances are computed against the original (pre-fill) table
    const std::vector<std::vector<double>> original = table;
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t f = 0; f < f_count; ++f) {
            if (!std::isnan(original[r][f]))
                continue;
            std::vector<std::pair<double, std::size_t>> candidates;
            for (std::size_t o = 0; o < original.size(); ++o) {
                if (o == r || std::isnan(original[o][f]))
                    continue;
                candidates.emplace_back(distance(original[r], original[o]), o);
            }
            if (candidates.empty())
                throw DataError("knn_impute: no donor rows for column " + std::to_string(f));
            std::sort(candidates.begin(), candidates.end());
            double s = 0.0;
            std::size_t used = 0;
            for (std::size_t i = 0; i < candidates.size() && used < k; ++i, ++used)
                s += original[candidates[i].second][f];
            table[r][f] = s / static_cast<double>(used);
        }
    }
}

std::vector<double> Scaler::transform_row(const std::vector<double>& row) const {
    if (row.size() != min.size())
        throw DimensionError("scaler: row width " + std::to_string(row.size()) +
                             " does not match fitted width " + std::to_string(min.size()));
    std::vector<double> out(row.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
        const double range = max[f] - min[f];
        out[f] = range == 0.0 ? 0.0 : (row[f] - min[f]) / range;
    }
    return out;
}

std::vector<double> Scaler::inverse_row(const std::vector<double>& row) const {
    if (row.size() != min.size())
        throw DimensionError("scaler: row width mismatch on inverse transform");
    std::vector<double> out(row.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
        const double range = max[f] - min[f];
        out[f] = range == 0.0 ? min[f] : row[f] * range + min[f];
    }
    return out;
}

Scaler fit_scaler(const std::vector<std::vector<double>>& train) {
    if (train.empty())
        throw DataError("fit_scaler: empty training table");
    const std::size_t f_count = train[0].size();
    Scaler s;
    s.min.assign(f_count, std::numeric_limits<double>::infinity());
    s.max.assign(f_count, -std::numeric_limits<double>::infinity());
    for (const auto& r : train) {
        if (r.size() != f_count)
            throw DataError("fit_scaler: ragged table");
        for (std::size_t f = 0; f < f_count; ++f) {
            if (std::isnan(r[f]))
                throw DataError("fit_scaler: NaN in column " + std::to_string(f) +
                                " (impute first)");
            s.min[f] = std::min(s.min[f], r[f]);
            s.max[f] = std::max(s.max[f], r[f]);
        }
    }
    return s;
}

void apply_scaler(const Scaler& s, std::vector<std::vector<double>>& table) {
    for (auto& r : table)
        r = s.transform_row(r);
}

// --- windowing ---------------------------------------------------------------

WindowResult window_dataset(const Dataset& ds, std::size_t m, std::size_t n,
                            const std::vector<std::string>& exclude_features) {
    if (m < 2)
        throw ContractError("window_dataset: m must be at least 2");
    if (n < 1)
        throw ContractError("window_dataset: n must be at least 1");

    std::vector<std::size_t> keep;
    WindowResult out;
    for (std::size_t f = 0; f < ds.feature_names.size(); ++f) {
        if (std::find(exclude_features.begin(), exclude_features.end(), ds.feature_names[f]) ==
            exclude_features.end()) {
            keep.push_back(f);
            out.feature_names.push_back(ds.feature_names[f]);
        }
    }
    if (keep.empty())
        throw ConfigError("window_dataset: all features excluded");

    for (const auto& p : ds.patients) {
        if (p.visits.size() < m + n) {
            ++out.skipped;
            continue;
        }
        WindowedSample s;
        s.patient_id = p.id;
        s.m = m;
        s.n = n;
        s.demographics = p.demographics;
        s.e.unit = ds.unit;
        for (std::size_t t = 0; t < m; ++t) {
            std::vector<double> row;
            row.reserve(keep.size());
            for (std::size_t f : keep)
                row.push_back(p.visits[t].features.at(f));
            s.x.push_back(std::move(row));
            s.e.values.push_back(t == 0 ? 0.0 : p.visits[t].elapsed);
        }
        s.label = p.visits[m + n - 1].label;
        out.samples.push_back(std::move(s));
    }
    return out;
}

// --- persistence ---------------------------------------------------------------

namespace {

json features_to_json(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) {
        if (std::isnan(x))
            arr.push_back(nullptr);
        else
            arr.push_back(x);
    }
    return arr;
}

std::vector<double> features_from_json(const json& arr) {
    std::vector<double> v;
    v.reserve(arr.size());
    for (const auto& x : arr)
        v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    return v;
}

} // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open '" + path + "' for writing");
    json header = {{"schema", kSchemaName},
                   {"version", kSchemaVersion},
                   {"unit", to_string(ds.unit)},
                   {"features", ds.feature_names},
                   {"demographics", ds.demographic_names}};
    out << header.dump() << "\n";
    for (const auto& p : ds.patients) {
        json visits = json::array();
        for (const auto& v : p.visits)
            visits.push_back({{"x", features_to_json(v.features)},
                              {"e", v.elapsed},
                              {"y", v.label}});
        json rec = {{"id", p.id}, {"dem", p.demographics}, {"visits", visits}};
        out << rec.dump() << "\n";
    }
    if (!out)
        throw DataError("write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open dataset file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw DataError("dataset file '" + path + "' is empty");

    Dataset ds;
    std::size_t line_no = 1;
    try {
        json header = json::parse(line);
        if (header.value("schema", "") != kSchemaName)
            throw DataError("'" + path + "' is not a " + kSchemaName + " file");
        const int version = header.value("version", -1);
        if (version != kSchemaVersion)
            throw DataError("unsupported dataset schema version " + std::to_string(version) +
                            " in '" + path + "' (expected " + std::to_string(kSchemaVersion) +
                            ")");
        if (!header.contains("unit"))
            throw DataError("dataset header in '" + path + "' is missing the time unit");
        ds.unit = time_unit_from_string(header.at("unit").get<std::string>());
        ds.feature_names = header.at("features").get<std::vector<std::string>>();
        ds.demographic_names = header.at("demographics").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw DataError("malformed dataset header in '" + path + "': " + e.what());
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            json rec = json::parse(line);
            PatientRecord p;
            p.id = rec.at("id").get<std::string>();
            p.demographics = rec.at("dem").get<std::vector<double>>();
            for (const auto& jv : rec.at("visits")) {
                Visit v;
                v.features = features_from_json(jv.at("x"));
                v.elapsed = jv.at("e").get<double>();
                v.label = jv.at("y").get<int>();
                p.visits.push_back(std::move(v));
            }
            p.validate(ds.feature_names.size(), ds.demographic_names.size());
            ds.patients.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw DataError("malformed record at line " + std::to_string(line_no) + " of '" +
                            path + "': " + e.what());
        }
    }
    return ds;
}

} // namespace tarnn
