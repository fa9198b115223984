#include "tarnn/tarnn.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "tarnn/data.hpp"
#include "tarnn/errors.hpp"
#include "tarnn/metrics.hpp"
#include "tarnn/model.hpp"
#include "tarnn/pipeline.hpp"
#include "tarnn/training.hpp"

struct tarnn_dataset {
    tarnn::Dataset ds;
};

struct tarnn_model {
    tarnn::Model m;
};

namespace {

thread_local std::string g_last_error;

constexpr std::size_t kDefaultKnnK = 5;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
tarnn_status wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return TARNN_OK;
    } catch (const tarnn::ContractError& e) {
        g_last_error = e.what();
        return TARNN_ERR_USAGE;
    } catch (const tarnn::ConfigError& e) {
        g_last_error = e.what();
        return TARNN_ERR_USAGE;
    } catch (const tarnn::DataError& e) {
        g_last_error = e.what();
        return TARNN_ERR_DATA;
    } catch (const tarnn::NumericError& e) {
        g_last_error = e.what();
        return TARNN_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TARNN_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return TARNN_ERROR;
    }
}

void require(bool ok, const char* what) {
    if (!ok)
        throw tarnn::ContractError(what);
}

// key=value lines; '#' starts a comment, blank lines ignored
std::map<std::string, std::string> parse_kv(const char* text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text ? text : "");
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos)
            return std::string();
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw tarnn::ConfigError("config line " + std::to_string(line_no) +
                                     " is not key=value: '" + line + "'");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

class KvReader {
  public:
    explicit KvReader(const char* text) : kv_(parse_kv(text)) {}

    std::string str(const std::string& key, const std::string& def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? def : it->second;
    }
    double num(const std::string& key, double def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end())
            return def;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size())
                throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw tarnn::ConfigError("config key '" + key + "' is not a number: '" + it->second +
                                     "'");
        }
    }
    std::size_t unsigned_num(const std::string& key, std::size_t def) {
        const double v = num(key, static_cast<double>(def));
        if (v < 0.0 || v != std::floor(v))
            throw tarnn::ConfigError("config key '" + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(v);
    }
    bool flag(const std::string& key, bool def) {
        const std::string v = str(key, def ? "true" : "false");
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        throw tarnn::ConfigError("config key '" + key + "' is not a boolean: '" + v + "'");
    }
    std::vector<std::string> list(const std::string& key) {
        std::vector<std::string> out;
        std::istringstream in(str(key, ""));
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty())
                out.push_back(item);
        return out;
    }
    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (!seen_.count(key))
                throw tarnn::ConfigError("unknown config key '" + key + "'");
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> seen_;
};

std::string format_fixed(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<tarnn::WindowedSample> windows_for(const tarnn_model* model, const tarnn_dataset* data,
                                               std::size_t knn_k) {
    return tarnn::prepare_eval_data(data->ds, model->m, knn_k ? knn_k : kDefaultKnnK);
}

} // namespace

extern "C" {

const char* tarnn_version(void) { return "1.0.0"; }

const char* tarnn_last_error(void) { return g_last_error.c_str(); }

void tarnn_string_free(char* s) { std::free(s); }
void tarnn_buffer_free(void* p) { std::free(p); }

tarnn_status tarnn_dataset_generate(const char* config_text, tarnn_dataset** out) {
    return wrap([&] {
        require(out != nullptr, "tarnn_dataset_generate: out is null");
        KvReader kv(config_text);
        tarnn::GenConfig cfg;
        cfg.patients = kv.unsigned_num("patients", cfg.patients);
        cfg.features = kv.unsigned_num("features", cfg.features);
        cfg.signal_features = kv.unsigned_num("signal_features", cfg.signal_features);
        cfg.demographics = kv.unsigned_num("demographics", cfg.demographics);
        cfg.min_visits = kv.unsigned_num("min_visits", cfg.min_visits);
        cfg.max_visits = kv.unsigned_num("max_visits", cfg.max_visits);
        cfg.gap_log_mean = kv.num("gap_log_mean", cfg.gap_log_mean);
        cfg.gap_log_sigma = kv.num("gap_log_sigma", cfg.gap_log_sigma);
        cfg.gap_min = kv.num("gap_min", cfg.gap_min);
        cfg.gap_max = kv.num("gap_max", cfg.gap_max);
        cfg.severity_start_max = kv.num("severity_start_max", cfg.severity_start_max);
        cfg.severity_rate_min = kv.num("severity_rate_min", cfg.severity_rate_min);
        cfg.severity_rate_max = kv.num("severity_rate_max", cfg.severity_rate_max);
        cfg.severity_noise = kv.num("severity_noise", cfg.severity_noise);
        cfg.feature_noise = kv.num("feature_noise", cfg.feature_noise);
        cfg.missing_rate = kv.num("missing_rate", cfg.missing_rate);
        cfg.hazard_severity = kv.num("hazard_severity", cfg.hazard_severity);
        cfg.hazard_time = kv.num("hazard_time", cfg.hazard_time);
        cfg.hazard_bias = kv.num("hazard_bias", cfg.hazard_bias);
        cfg.unit = tarnn::time_unit_from_string(kv.str("unit", "years"));
        const auto seed = kv.unsigned_num("seed", 0);
        kv.reject_unknown();
        *out = new tarnn_dataset{tarnn::generate_synthetic(cfg, seed)};
    });
}

tarnn_status tarnn_dataset_load(const char* path, tarnn_dataset** out) {
    return wrap([&] {
        require(path != nullptr && out != nullptr, "tarnn_dataset_load: null argument");
        *out = new tarnn_dataset{tarnn::load_dataset(path)};
    });
}

tarnn_status tarnn_dataset_save(const tarnn_dataset* ds, const char* path) {
    return wrap([&] {
        require(ds != nullptr && path != nullptr, "tarnn_dataset_save: null argument");
        tarnn::save_dataset(ds->ds, path);
    });
}

tarnn_status tarnn_dataset_card(const tarnn_dataset* ds, char** out_text) {
    return wrap([&] {
        require(ds != nullptr && out_text != nullptr, "tarnn_dataset_card: null argument");
        *out_text = dup_string(ds->ds.data_card);
    });
}

unsigned long long tarnn_dataset_patient_count(const tarnn_dataset* ds) {
    return ds ? ds->ds.patients.size() : 0;
}

void tarnn_dataset_free(tarnn_dataset* ds) { delete ds; }

tarnn_status tarnn_train(const tarnn_dataset* train_data, const tarnn_dataset* validation_or_null,
                         const char* config_text, tarnn_model** out_model,
                         char** out_history_csv) {
    return wrap([&] {
        require(train_data != nullptr && out_model != nullptr, "tarnn_train: null argument");
        KvReader kv(config_text);
        const std::size_t m = kv.unsigned_num("m", 3);
        const std::size_t n = kv.unsigned_num("n", 1);
        const std::size_t knn_k = kv.unsigned_num("knn_k", kDefaultKnnK);
        const auto exclude = kv.list("exclude");
        const bool use_dem = kv.flag("use_demographics", true);

        std::string variant_str = kv.str("variant", "");
        if (variant_str.empty())
            variant_str = n > 1 ? "ta-rnn-ae" : "ta-rnn";
        tarnn::ModelConfig mc;
        mc.variant = tarnn::variant_from_string(variant_str);
        if (!tarnn::is_autoencoder(mc.variant) && n > 1)
            throw tarnn::ConfigError("variant " + variant_str +
                                     " predicts the next visit; use an -ae variant for n > 1");

        tarnn::PreparedTraining prep =
            tarnn::prepare_training_data(train_data->ds, m, n, exclude, knn_k);
        if (prep.samples.empty())
            throw tarnn::DataError("no patient has the " + std::to_string(m + n) +
                                   " visits required by scenario m=" + std::to_string(m) +
                                   ", n=" + std::to_string(n));
        if (!use_dem) {
            prep.demographic_names.clear();
            prep.scaler.min.resize(prep.feature_names.size());
            prep.scaler.max.resize(prep.feature_names.size());
            for (auto& s : prep.samples)
                s.demographics.clear();
        }

        const std::size_t f_kept = prep.feature_names.size();
        std::size_t d_model = kv.unsigned_num("embedding", 0);
        if (d_model == 0)
            d_model = f_kept;
        mc.d_model = d_model;
        mc.cell.kind = tarnn::cell_kind_from_string(kv.str("cell", "gru"));
        mc.cell.input_size = d_model;
        mc.cell.hidden_size = kv.unsigned_num("hidden", 16);
        mc.mlp_hidden = kv.unsigned_num("mlp_hidden", 16);
        mc.demographic_size = prep.demographic_names.size();
        mc.feature_count = f_kept;
        mc.horizon = tarnn::is_autoencoder(mc.variant) ? n : 1;
        mc.dropout_rate = kv.num("dropout", 0.0);
        mc.l2_lambda = kv.num("l2", 0.0);

        tarnn::TrainConfig tc;
        tc.epochs = kv.unsigned_num("epochs", 30);
        tc.batch_size = kv.unsigned_num("batch", 32);
        tc.learning_rate = kv.num("lr", 0.001);
        tc.delta = kv.num("delta", 0.7);
        tc.l2_lambda = mc.l2_lambda;
        tc.seed = kv.unsigned_num("seed", 0);
        kv.reject_unknown();

        if (prep.samples.size() < tc.batch_size)
            throw tarnn::DataError("too few usable patients: " +
                                   std::to_string(prep.samples.size()) + " windows for scenario m=" +
                                   std::to_string(m) + ", n=" + std::to_string(n) +
                                   " but batch size is " + std::to_string(tc.batch_size));

        std::vector<tarnn::WindowedSample> val_windows;
        const std::vector<tarnn::WindowedSample>* val_ptr = nullptr;
        if (validation_or_null) {
            if (validation_or_null->ds.unit != train_data->ds.unit)
                throw tarnn::DataError("validation dataset unit differs from the training unit");
            val_windows = tarnn::prepare_windows(validation_or_null->ds, prep.scaler,
                                                 prep.feature_names, prep.demographic_names,
                                                 m, mc.horizon, knn_k);
            val_ptr = &val_windows;
        }

        tarnn::TrainResult result =
            tarnn::train(prep.samples, mc, tc, train_data->ds.unit, prep.feature_names,
                         prep.demographic_names, prep.scaler, val_ptr);
        if (out_history_csv)
            *out_history_csv = dup_string(tarnn::history_to_csv(result.history));
        *out_model = new tarnn_model{std::move(result.model)};
    });
}

tarnn_status tarnn_model_save(const tarnn_model* model, const char* path) {
    return wrap([&] {
        require(model != nullptr && path != nullptr, "tarnn_model_save: null argument");
        tarnn::save_model(model->m, path);
    });
}

tarnn_status tarnn_model_load(const char* path, tarnn_model** out) {
    return wrap([&] {
        require(path != nullptr && out != nullptr, "tarnn_model_load: null argument");
        *out = new tarnn_model{tarnn::load_model(path)};
    });
}

tarnn_status tarnn_model_get_info(const tarnn_model* model, tarnn_model_info* out) {
    return wrap([&] {
        require(model != nullptr && out != nullptr, "tarnn_model_get_info: null argument");
        const tarnn::Model& m = model->m;
        *out = tarnn_model_info{};
        out->window_m = m.window_m;
        out->horizon = m.cfg.horizon;
        out->d_model = m.cfg.d_model;
        out->hidden_size = m.cfg.cell.hidden_size;
        out->feature_count = m.cfg.feature_count;
        out->demographic_size = m.cfg.demographic_size;
        out->et_max = m.params.te.et_max;
        std::snprintf(out->variant, sizeof out->variant, "%s", to_string(m.cfg.variant));
        std::snprintf(out->cell, sizeof out->cell, "%s", to_string(m.cfg.cell.kind));
        std::snprintf(out->unit, sizeof out->unit, "%s", to_string(m.unit));
    });
}

void tarnn_model_free(tarnn_model* model) { delete model; }

tarnn_status tarnn_predict(const tarnn_model* model, const tarnn_dataset* data, size_t knn_k,
                           double** out_scores, int** out_labels, size_t* out_count) {
    return wrap([&] {
        require(model != nullptr && data != nullptr && out_count != nullptr,
                "tarnn_predict: null argument");
        auto windows = windows_for(model, data, knn_k);
        auto scores = tarnn::predict_scores(model->m, windows);
        *out_count = windows.size();
        if (out_scores) {
            *out_scores = static_cast<double*>(std::malloc(sizeof(double) * scores.size()));
            std::copy(scores.begin(), scores.end(), *out_scores);
        }
        if (out_labels) {
            *out_labels = static_cast<int*>(std::malloc(sizeof(int) * windows.size()));
            for (std::size_t i = 0; i < windows.size(); ++i)
                (*out_labels)[i] = windows[i].label;
        }
    });
}

tarnn_status tarnn_evaluate(const tarnn_model* model, const tarnn_dataset* data, double threshold,
                            size_t knn_k, tarnn_metrics* out) {
    return wrap([&] {
        require(model != nullptr && data != nullptr && out != nullptr,
                "tarnn_evaluate: null argument");
        auto windows = windows_for(model, data, knn_k);
        if (windows.empty())
            throw tarnn::DataError("no patient in the dataset has enough visits to evaluate");
        tarnn::EvalResult ev = tarnn::evaluate_model(model->m, windows, threshold);
        *out = tarnn_metrics{};
        out->f2 = ev.f2;
        out->sensitivity = ev.sens;
        out->auc_defined = ev.auc.has_value() ? 1 : 0;
        out->auc = ev.auc.value_or(0.0);
        out->tp = ev.counts.tp;
        out->fp = ev.counts.fp;
        out->tn = ev.counts.tn;
        out->fn = ev.counts.fn;
        out->n = ev.n;
    });
}

tarnn_status tarnn_explain_to_dir(const tarnn_model* model, const tarnn_dataset* data,
                                  size_t knn_k, const char* out_dir, int write_heatmaps) {
    return wrap([&] {
        require(model != nullptr && data != nullptr && out_dir != nullptr,
                "tarnn_explain_to_dir: null argument");
        auto windows = windows_for(model, data, knn_k);
        if (windows.empty())
            throw tarnn::DataError("no patient in the dataset has enough visits to explain");

        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        const tarnn::Model& m = model->m;
        const std::size_t t_len = m.window_m;
        const std::size_t d = m.cfg.d_model;

        // column labels: real feature names when beta lives in feature space
        std::vector<std::string> dims;
        if (d == m.feature_names.size())
            dims = m.feature_names;
        else
            for (std::size_t f = 0; f < d; ++f)
                dims.push_back("dim" + std::to_string(f));

        std::ofstream visits(fs::path(out_dir) / "visit_weights.csv");
        std::ofstream feats(fs::path(out_dir) / "feature_weights.csv");
        std::ofstream comb(fs::path(out_dir) / "combined_weights.csv");
        visits << "patient";
        for (std::size_t j = 0; j < t_len; ++j)
            visits << ",visit" << j + 1;
        visits << "\n";
        feats << "patient,visit";
        comb << "patient,visit";
        for (const auto& name : dims) {
            feats << "," << name;
            comb << "," << name;
        }
        feats << "\n";
        comb << "\n";

        std::vector<double> mean_alpha(t_len, 0.0);
        std::vector<double> mean_beta(d, 0.0), mean_combined(d, 0.0);
        std::vector<std::vector<double>> mean_combined_matrix(t_len, std::vector<double>(d, 0.0));
        for (const auto& w : windows) {
            tarnn::AttentionReport rep = tarnn::explain(m, w);
            visits << w.patient_id;
            for (std::size_t j = 0; j < t_len; ++j) {
                visits << "," << format_fixed(rep.alpha[j]);
                mean_alpha[j] += rep.alpha[j];
            }
            visits << "\n";
            for (std::size_t j = 0; j < t_len; ++j) {
                feats << w.patient_id << "," << j + 1;
                comb << w.patient_id << "," << j + 1;
                for (std::size_t f = 0; f < d; ++f) {
                    feats << "," << format_fixed(rep.beta[j][f]);
                    comb << "," << format_fixed(rep.combined[j][f]);
                    mean_beta[f] += rep.beta[j][f];
                    mean_combined[f] += rep.combined[j][f];
                    mean_combined_matrix[j][f] += rep.combined[j][f];
                }
                feats << "\n";
                comb << "\n";
            }
        }
        const double n_samples = static_cast<double>(windows.size());

        std::ofstream cv(fs::path(out_dir) / "cohort_visit_means.csv");
        cv << "visit,mean_alpha\n";
        for (std::size_t j = 0; j < t_len; ++j)
            cv << j + 1 << "," << format_fixed(mean_alpha[j] / n_samples) << "\n";

        std::ofstream cf(fs::path(out_dir) / "cohort_feature_means.csv");
        cf << "feature,mean_beta,mean_combined\n";
        for (std::size_t f = 0; f < d; ++f)
            cf << dims[f] << "," << format_fixed(mean_beta[f] / (n_samples * t_len)) << ","
               << format_fixed(mean_combined[f] / n_samples) << "\n";

        if (write_heatmaps) {
            // plain PGM, visits down, features across, scaled to the matrix max
            double peak = 0.0;
            for (const auto& rowv : mean_combined_matrix)
                for (double x : rowv)
                    peak = std::max(peak, x / n_samples);
            std::ofstream pgm(fs::path(out_dir) / "cohort_combined_heatmap.pgm");
            pgm << "P2\n" << d << " " << t_len << "\n255\n";
            for (std::size_t j = 0; j < t_len; ++j) {
                for (std::size_t f = 0; f < d; ++f) {
                    const double v = mean_combined_matrix[j][f] / n_samples;
                    const int px = peak > 0.0 ? static_cast<int>(std::lround(v / peak * 255.0)) : 0;
                    pgm << px << (f + 1 < d ? " " : "");
                }
                pgm << "\n";
            }
        }
    });
}

tarnn_status tarnn_explain_sample(const tarnn_model* model, const tarnn_dataset* data,
                                  size_t knn_k, size_t window_index, double* alpha, double* beta,
                                  double* combined) {
    return wrap([&] {
        require(model != nullptr && data != nullptr, "tarnn_explain_sample: null argument");
        auto windows = windows_for(model, data, knn_k);
        if (window_index >= windows.size())
            throw tarnn::ContractError("window index " + std::to_string(window_index) +
                                       " out of range, dataset yields " +
                                       std::to_string(windows.size()) + " windows");
        tarnn::AttentionReport rep = tarnn::explain(model->m, windows[window_index]);
        const std::size_t t_len = rep.alpha.size();
        const std::size_t d = rep.beta.empty() ? 0 : rep.beta[0].size();
        for (std::size_t j = 0; j < t_len; ++j) {
            if (alpha)
                alpha[j] = rep.alpha[j];
            for (std::size_t f = 0; f < d; ++f) {
                if (beta)
                    beta[j * d + f] = rep.beta[j][f];
                if (combined)
                    combined[j * d + f] = rep.combined[j][f];
            }
        }
    });
}

} // extern "C"
