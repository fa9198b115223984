#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tarnn/time_embedding.hpp"

namespace tarnn {

struct Visit {
    std::vector<double> features; // NaN marks a missing value
    double elapsed = 0.0;         // gap to the previous visit; 0 at the first
    int label = 0;                // binary clinical outcome at this visit
};

struct PatientRecord {
    std::string id;
    std::vector<Visit> visits;
    std::vector<double> demographics;

    void validate(std::size_t n_features, std::size_t n_demographics) const;
};

struct Dataset {
    TimeUnit unit = TimeUnit::Years;
    std::vector<std::string> feature_names;
    std::vector<std::string> demographic_names;
    std::vector<PatientRecord> patients;
    std::string data_card; // set by the generator; not persisted in the dataset file
};

// Synthetic longitudinal cohort. Each patient carries a latent severity that
// drifts upward visit to visit; conversion risk grows with both severity and
// the time already elapsed, and labels are monotone (once positive, always
// positive).
struct GenConfig {
    std::size_t patients = 200;
    std::size_t features = 10;        // longitudinal features
    std::size_t signal_features = 4;  // first k features track severity, rest are noise
    std::size_t demographics = 2;
    std::size_t min_visits = 4;
    std::size_t max_visits = 8;
    double gap_log_mean = 0.0;   // lognormal visit gaps ...
    double gap_log_sigma = 0.5;
    double gap_min = 0.25;       // ... clamped to [gap_min, gap_max]
    double gap_max = 3.0;
    double severity_start_max = 0.4;
    double severity_rate_min = 0.02;
    double severity_rate_max = 0.15;
    double severity_noise = 0.02;
    double feature_noise = 0.1;      // observation noise on signal features
    double missing_rate = 0.0;       // per-cell missingness
    double hazard_severity = 4.0;    // logistic weight on severity
    double hazard_time = 0.0;        // logistic weight on cumulative elapsed time
    double hazard_bias = -4.0;
    TimeUnit unit = TimeUnit::Years;

    void validate() const;
};

Dataset generate_synthetic(const GenConfig& cfg, std::uint64_t seed);

// --- preprocessing -----------------------------------------------------------

/// Fills NaN cells in place. Row distance is the Euclidean distance over
/// co-observed features scaled by sqrt(F / #co-observed); a missing cell
/// becomes the mean of that feature over the k nearest rows observing it.
void knn_impute(std::vector<std::vector<double>>& table, std::size_t k);

struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    std::vector<double> transform_row(const std::vector<double>& row) const;
    std::vector<double> inverse_row(const std::vector<double>& row) const;
};

/// Min-max parameters fit on `train` only; constant columns map to 0.
/// Values outside the training range scale past [0, 1] without clipping.
Scaler fit_scaler(const std::vector<std::vector<double>>& train);
void apply_scaler(const Scaler& s, std::vector<std::vector<double>>& table);

// --- windowing ---------------------------------------------------------------

struct WindowedSample {
    std::string patient_id;
    std::vector<std::vector<double>> x; // m visits of kept features
    ElapsedTimes e;                     // m entries, e.values[0] == 0
    std::vector<double> demographics;
    int label = 0; // outcome at visit m+n of the source patient
    std::size_t m = 0;
    std::size_t n = 0;
};

struct WindowResult {
    std::vector<WindowedSample> samples;
    std::size_t skipped = 0; // patients with fewer than m+n visits
    std::vector<std::string> feature_names; // after exclusions
};

/// One window per qualifying patient: the first m visits as input, the label
/// read n visits further on. Excluded features are dropped by name.
WindowResult window_dataset(const Dataset& ds, std::size_t m, std::size_t n,
                            const std::vector<std::string>& exclude_features = {});

// --- persistence ---------------------------------------------------------------

// Line-delimited: a header record followed by one patient record per line.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace tarnn
