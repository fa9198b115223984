#include "tarnn/pipeline.hpp"

#include <algorithm>

#include "tarnn/errors.hpp"

namespace tarnn {

namespace {

// All visit rows of the dataset, imputed in place.
std::vector<std::vector<double>> imputed_visit_table(const Dataset& ds, std::size_t knn_k) {
    std::vector<std::vector<double>> table;
    for (const auto& p : ds.patients)
        for (const auto& v : p.visits)
            table.push_back(v.features);
    knn_impute(table, knn_k);
    return table;
}

void write_back(Dataset& ds, const std::vector<std::vector<double>>& table) {
    std::size_t r = 0;
    for (auto& p : ds.patients)
        for (auto& v : p.visits)
            v.features = table[r++];
}

} // namespace

PreparedTraining prepare_training_data(const Dataset& ds, std::size_t m, std::size_t n,
                                       const std::vector<std::string>& exclude_features,
                                       std::size_t knn_k) {
    Dataset imputed = ds;
    if (!imputed.patients.empty())
        write_back(imputed, imputed_visit_table(imputed, knn_k));

    WindowResult windows = window_dataset(imputed, m, n, exclude_features);

    // scaler over all visit rows of the split, kept columns only
    std::vector<std::size_t> keep;
    for (const auto& name : windows.feature_names) {
        auto it = std::find(imputed.feature_names.begin(), imputed.feature_names.end(), name);
        keep.push_back(static_cast<std::size_t>(it - imputed.feature_names.begin()));
    }
    std::vector<std::vector<double>> kept_rows;
    for (const auto& p : imputed.patients)
        for (const auto& v : p.visits) {
            std::vector<double> row;
            row.reserve(keep.size());
            for (std::size_t f : keep)
                row.push_back(v.features[f]);
            kept_rows.push_back(std::move(row));
        }
    if (kept_rows.empty())
        throw DataError("prepare_training_data: dataset has no visits");
    Scaler feature_scaler = fit_scaler(kept_rows);

    Scaler dem_scaler;
    if (!imputed.demographic_names.empty()) {
        std::vector<std::vector<double>> dem_rows;
        for (const auto& p : imputed.patients)
            dem_rows.push_back(p.demographics);
        dem_scaler = fit_scaler(dem_rows);
    }

    PreparedTraining out;
    out.samples = std::move(windows.samples);
    out.feature_names = std::move(windows.feature_names);
    out.demographic_names = imputed.demographic_names;
    out.skipped = windows.skipped;
    for (auto& s : out.samples) {
        for (auto& row : s.x)
            row = feature_scaler.transform_row(row);
        if (!s.demographics.empty())
            s.demographics = dem_scaler.transform_row(s.demographics);
    }

    out.scaler = std::move(feature_scaler);
    out.scaler.min.insert(out.scaler.min.end(), dem_scaler.min.begin(), dem_scaler.min.end());
    out.scaler.max.insert(out.scaler.max.end(), dem_scaler.max.begin(), dem_scaler.max.end());
    return out;
}

std::vector<WindowedSample> prepare_windows(const Dataset& ds, const Scaler& combined_scaler,
                                            const std::vector<std::string>& feature_names,
                                            const std::vector<std::string>& demographic_names,
                                            std::size_t m, std::size_t n, std::size_t knn_k) {
    if (!demographic_names.empty() && ds.demographic_names != demographic_names)
        throw DataError("dataset demographics do not match the expected demographics");

    std::vector<std::size_t> col;
    for (const auto& name : feature_names) {
        auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
        if (it == ds.feature_names.end())
            throw DataError("dataset is missing required feature '" + name + "'");
        col.push_back(static_cast<std::size_t>(it - ds.feature_names.begin()));
    }

    Dataset imputed = ds;
    if (!imputed.patients.empty())
        write_back(imputed, imputed_visit_table(imputed, knn_k));

    const std::size_t f_kept = feature_names.size();
    const std::size_t d_count = demographic_names.size();
    if (combined_scaler.min.size() != f_kept + d_count)
        throw DataError("scaler does not cover the feature and demographic lists");
    Scaler feature_scaler{{combined_scaler.min.begin(), combined_scaler.min.begin() + f_kept},
                          {combined_scaler.max.begin(), combined_scaler.max.begin() + f_kept}};
    Scaler dem_scaler{{combined_scaler.min.begin() + f_kept, combined_scaler.min.end()},
                      {combined_scaler.max.begin() + f_kept, combined_scaler.max.end()}};

    std::vector<WindowedSample> out;
    for (const auto& p : imputed.patients) {
        if (p.visits.size() < m + n)
            continue;
        WindowedSample s;
        s.patient_id = p.id;
        s.m = m;
        s.n = n;
        s.e.unit = imputed.unit;
        for (std::size_t t = 0; t < m; ++t) {
            std::vector<double> row;
            row.reserve(f_kept);
            for (std::size_t f : col)
                row.push_back(p.visits[t].features[f]);
            s.x.push_back(feature_scaler.transform_row(row));
            s.e.values.push_back(t == 0 ? 0.0 : p.visits[t].elapsed);
        }
        s.demographics = d_count > 0 ? dem_scaler.transform_row(p.demographics)
                                     : std::vector<double>{};
        s.label = p.visits[m + n - 1].label;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<WindowedSample> prepare_eval_data(const Dataset& ds, const Model& model,
                                              std::size_t knn_k) {
    if (ds.unit != model.unit)
        throw DataError(std::string("dataset unit '") + to_string(ds.unit) +
                        "' does not match the model's unit '" + to_string(model.unit) + "'");
    return prepare_windows(ds, model.scaler, model.feature_names, model.demographic_names,
                           model.window_m, model.cfg.horizon, knn_k);
}

} // namespace tarnn
