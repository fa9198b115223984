// tarnn command-line tool: synthetic cohorts, training, evaluation, ablation
// sweeps and attention reports over the shared-library C API.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "tarnn/tarnn.h"

namespace fs = std::filesystem;

namespace {

struct DatasetHandle {
    tarnn_dataset* p = nullptr;
    ~DatasetHandle() { tarnn_dataset_free(p); }
};

// Config files share the library's key=value format; flags passed on the
// command line override file entries, which override the library defaults.
std::string read_config_file(const std::string& path) {
    if (path.empty())
        return "";
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "tarnn: cannot read config file %s\n", path.c_str());
        std::exit(3);
    }
    std::ostringstream os;
    os << in.rdbuf();
    std::string text = os.str();
    if (!text.empty() && text.back() != '\n')
        text += '\n';
    return text;
}

struct KeyBinding {
    std::string key;
    std::string flag;
    std::function<std::string()> value;
};

std::string flag_overrides(const CLI::App* cmd, const std::vector<KeyBinding>& bindings) {
    std::string out;
    for (const auto& b : bindings)
        if (cmd->count(b.flag) > 0)
            out += b.key + "=" + b.value() + "\n";
    return out;
}

struct ModelHandle {
    tarnn_model* p = nullptr;
    ~ModelHandle() { tarnn_model_free(p); }
};

int fail(tarnn_status st, const std::string& what) {
    std::fprintf(stderr, "tarnn: %s: %s\n", what.c_str(), tarnn_last_error());
    return static_cast<int>(st);
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        std::fprintf(stderr, "tarnn: cannot write %s\n", path.string().c_str());
        std::exit(3);
    }
}

// ---------------------------------------------------------------- generate --

struct GenerateArgs {
    std::string out, config;
    std::uint64_t patients = 200, features = 10, signal_features = 4, demographics = 2;
    std::uint64_t min_visits = 4, max_visits = 8, seed = 0;
    double gap_log_mean = 0.0, gap_log_sigma = 0.5, gap_min = 0.25, gap_max = 3.0;
    double severity_start_max = 0.4, severity_rate_min = 0.02, severity_rate_max = 0.15;
    double severity_noise = 0.02, feature_noise = 0.1, missing_rate = 0.0;
    double hazard_severity = 4.0, hazard_time = 0.0, hazard_bias = -4.0;
    std::string unit = "years";
};

std::vector<KeyBinding> generate_bindings(const GenerateArgs& a) {
    return {
        {"patients", "--patients", [&a] { return std::to_string(a.patients); }},
        {"features", "--features", [&a] { return std::to_string(a.features); }},
        {"signal_features", "--signal-features", [&a] { return std::to_string(a.signal_features); }},
        {"demographics", "--demographics", [&a] { return std::to_string(a.demographics); }},
        {"min_visits", "--min-visits", [&a] { return std::to_string(a.min_visits); }},
        {"max_visits", "--max-visits", [&a] { return std::to_string(a.max_visits); }},
        {"gap_log_mean", "--gap-log-mean", [&a] { return num(a.gap_log_mean); }},
        {"gap_log_sigma", "--gap-log-sigma", [&a] { return num(a.gap_log_sigma); }},
        {"gap_min", "--gap-min", [&a] { return num(a.gap_min); }},
        {"gap_max", "--gap-max", [&a] { return num(a.gap_max); }},
        {"severity_start_max", "--severity-start-max",
         [&a] { return num(a.severity_start_max); }},
        {"severity_rate_min", "--severity-rate-min", [&a] { return num(a.severity_rate_min); }},
        {"severity_rate_max", "--severity-rate-max", [&a] { return num(a.severity_rate_max); }},
        {"severity_noise", "--severity-noise", [&a] { return num(a.severity_noise); }},
        {"feature_noise", "--feature-noise", [&a] { return num(a.feature_noise); }},
        {"missing_rate", "--missing-rate", [&a] { return num(a.missing_rate); }},
        {"hazard_severity", "--hazard-severity", [&a] { return num(a.hazard_severity); }},
        {"hazard_time", "--hazard-time", [&a] { return num(a.hazard_time); }},
        {"hazard_bias", "--hazard-bias", [&a] { return num(a.hazard_bias); }},
        {"unit", "--unit", [&a] { return a.unit; }},
        {"seed", "--seed", [&a] { return std::to_string(a.seed); }},
    };
}

void add_generate(CLI::App& app, GenerateArgs& a, int& rc) {
    auto* cmd = app.add_subcommand("generate", "Generate a synthetic longitudinal cohort");
    cmd->add_option("--config", a.config, "Config file with key=value lines");
    cmd->add_option("--out", a.out, "Output dataset file (JSON lines)")->required();
    cmd->add_option("--patients", a.patients, "Number of patients");
    cmd->add_option("--features", a.features, "Longitudinal feature count");
    cmd->add_option("--signal-features", a.signal_features, "Features that track severity");
    cmd->add_option("--demographics", a.demographics, "Cross-sectional feature count");
    cmd->add_option("--min-visits", a.min_visits, "Minimum visits per patient");
    cmd->add_option("--max-visits", a.max_visits, "Maximum visits per patient");
    cmd->add_option("--gap-log-mean", a.gap_log_mean, "Lognormal gap mu");
    cmd->add_option("--gap-log-sigma", a.gap_log_sigma, "Lognormal gap sigma");
    cmd->add_option("--gap-min", a.gap_min, "Gap clamp lower bound");
    cmd->add_option("--gap-max", a.gap_max, "Gap clamp upper bound");
    cmd->add_option("--severity-start-max", a.severity_start_max, "Initial severity upper bound");
    cmd->add_option("--severity-rate-min", a.severity_rate_min, "Per-visit progression minimum");
    cmd->add_option("--severity-rate-max", a.severity_rate_max, "Per-visit progression maximum");
    cmd->add_option("--severity-noise", a.severity_noise, "Severity noise sd");
    cmd->add_option("--feature-noise", a.feature_noise, "Signal-feature observation noise sd");
    cmd->add_option("--missing-rate", a.missing_rate, "Per-cell missingness probability");
    cmd->add_option("--hazard-severity", a.hazard_severity, "Hazard weight on severity");
    cmd->add_option("--hazard-time", a.hazard_time, "Hazard weight on cumulative elapsed time");
    cmd->add_option("--hazard-bias", a.hazard_bias, "Hazard intercept");
    cmd->add_option("--unit", a.unit, "Elapsed-time unit (years or days)");
    cmd->add_option("--seed", a.seed, "Generator seed");
    cmd->callback([&, cmd] {
        const std::string cfg = read_config_file(a.config) + flag_overrides(cmd, generate_bindings(a));

        DatasetHandle ds;
        if (auto st = tarnn_dataset_generate(cfg.c_str(), &ds.p); st != TARNN_OK) {
            rc = fail(st, "generate");
            return;
        }
        if (auto parent = fs::path(a.out).parent_path(); !parent.empty())
            fs::create_directories(parent);
        if (auto st = tarnn_dataset_save(ds.p, a.out.c_str()); st != TARNN_OK) {
            rc = fail(st, "save dataset");
            return;
        }
        char* card = nullptr;
        if (tarnn_dataset_card(ds.p, &card) == TARNN_OK && card) {
            write_file(a.out + ".card.txt", card);
            tarnn_string_free(card);
        }
        std::printf("wrote %s (%llu patients)\n", a.out.c_str(),
                    tarnn_dataset_patient_count(ds.p));
    });
}

// ------------------------------------------------------------------- train --

struct TrainArgs {
    std::string data, val, out, config;
    std::uint64_t m = 3, n = 1, hidden = 16, embedding = 0, mlp_hidden = 16;
    std::uint64_t epochs = 30, batch = 32, seed = 0, knn_k = 5;
    double dropout = 0.0, l2 = 0.0, lr = 0.001, delta = 0.7;
    std::string variant, cell = "gru";
    std::vector<std::string> exclude;
    bool no_demographics = false;
};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? "," : "") + items[i];
    return out;
}

std::vector<KeyBinding> train_bindings(const TrainArgs& a) {
    return {
        {"m", "--m", [&a] { return std::to_string(a.m); }},
        {"n", "--n", [&a] { return std::to_string(a.n); }},
        {"variant", "--variant", [&a] { return a.variant; }},
        {"cell", "--cell", [&a] { return a.cell; }},
        {"hidden", "--hidden", [&a] { return std::to_string(a.hidden); }},
        {"embedding", "--embedding", [&a] { return std::to_string(a.embedding); }},
        {"mlp_hidden", "--mlp-hidden", [&a] { return std::to_string(a.mlp_hidden); }},
        {"dropout", "--dropout", [&a] { return num(a.dropout); }},
        {"l2", "--l2", [&a] { return num(a.l2); }},
        {"epochs", "--epochs", [&a] { return std::to_string(a.epochs); }},
        {"batch", "--batch", [&a] { return std::to_string(a.batch); }},
        {"lr", "--lr", [&a] { return num(a.lr); }},
        {"delta", "--delta", [&a] { return num(a.delta); }},
        {"seed", "--seed", [&a] { return std::to_string(a.seed); }},
        {"knn_k", "--knn-k", [&a] { return std::to_string(a.knn_k); }},
        {"exclude", "--exclude", [&a] { return join(a.exclude); }},
        {"use_demographics", "--no-demographics",
         [&a] { return a.no_demographics ? "false" : "true"; }},
    };
}

void add_train_options(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--m", a.m, "Input visits per window (>= 2)");
    cmd->add_option("--n", a.n, "Prediction horizon in visits (1 selects the next-visit model)");
    cmd->add_option("--variant", a.variant,
                    "ta-rnn, ta-rnn-ae, a-rnn, t-rnn, a-rnn-ae or t-rnn-ae (default by --n)");
    cmd->add_option("--cell", a.cell, "RNN cell: gru, lstm, bigru, bilstm");
    cmd->add_option("--hidden", a.hidden, "RNN hidden size");
    cmd->add_option("--embedding", a.embedding, "Embedding size d_model (0 = feature count)");
    cmd->add_option("--mlp-hidden", a.mlp_hidden, "Prediction-head hidden size");
    cmd->add_option("--dropout", a.dropout, "Dropout rate on the head's hidden layer");
    cmd->add_option("--l2", a.l2, "L2 penalty on weight matrices");
    cmd->add_option("--epochs", a.epochs, "Training epochs");
    cmd->add_option("--batch", a.batch, "Mini-batch size");
    cmd->add_option("--lr", a.lr, "Adam learning rate");
    cmd->add_option("--delta", a.delta, "Positive-class weight of the loss, in (0,1)");
    cmd->add_option("--seed", a.seed, "Training seed");
    cmd->add_option("--knn-k", a.knn_k, "Neighbors for KNN imputation");
    cmd->add_option("--exclude", a.exclude, "Feature names to drop from the inputs")
        ->delimiter(',');
    cmd->add_flag("--no-demographics", a.no_demographics, "Ignore demographic features");
}

void add_train(CLI::App& app, TrainArgs& a, int& rc) {
    auto* cmd = app.add_subcommand("train", "Train a model on a dataset file");
    cmd->add_option("--config", a.config, "Config file with key=value lines");
    cmd->add_option("--data", a.data, "Training dataset file")->required();
    cmd->add_option("--val", a.val, "Optional validation dataset for per-epoch metrics");
    cmd->add_option("--out", a.out, "Output directory")->required();
    add_train_options(cmd, a);
    cmd->callback([&, cmd] {
        const std::string cfg = read_config_file(a.config) + flag_overrides(cmd, train_bindings(a));
        DatasetHandle train_ds, val_ds;
        if (auto st = tarnn_dataset_load(a.data.c_str(), &train_ds.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.data);
            return;
        }
        if (!a.val.empty())
            if (auto st = tarnn_dataset_load(a.val.c_str(), &val_ds.p); st != TARNN_OK) {
                rc = fail(st, "load " + a.val);
                return;
            }
        ModelHandle model;
        char* history = nullptr;
        if (auto st = tarnn_train(train_ds.p, val_ds.p, cfg.c_str(), &model.p, &history);
            st != TARNN_OK) {
            rc = fail(st, "train");
            return;
        }
        fs::create_directories(a.out);
        const fs::path out(a.out);
        if (auto st = tarnn_model_save(model.p, (out / "model.json").string().c_str());
            st != TARNN_OK) {
            rc = fail(st, "save model");
            tarnn_string_free(history);
            return;
        }
        if (history) {
            write_file(out / "history.csv", history);
            tarnn_string_free(history);
        }
        // provenance: the exact key=value text handed to the library
        write_file(out / "effective_config.txt", cfg);
        tarnn_model_info info{};
        tarnn_model_get_info(model.p, &info);
        std::printf("trained %s (%s, m=%llu, n=%llu) -> %s\n", info.variant, info.cell,
                    info.window_m, info.horizon, (out / "model.json").string().c_str());
    });
}

// ---------------------------------------------------------------- evaluate --

struct EvaluateArgs {
    std::vector<std::string> models;
    std::string data, out = ".";
    double threshold = 0.5;
    std::uint64_t knn_k = 5;
};

std::string metrics_row(const std::string& name, const std::string& scenario,
                        const tarnn_metrics& m) {
    std::ostringstream os;
    os << name << "," << scenario << "," << m.n << "," << m.tp << "," << m.fp << "," << m.tn
       << "," << m.fn << "," << fixed6(m.f2) << "," << fixed6(m.sensitivity) << ","
       << (m.auc_defined ? fixed6(m.auc) : "") << "\n";
    return os.str();
}

void add_evaluate(CLI::App& app, EvaluateArgs& a, int& rc) {
    auto* cmd = app.add_subcommand("evaluate", "Evaluate model artifacts on a test dataset");
    cmd->add_option("--model", a.models, "Model artifact (repeat for a seed sweep)")->required();
    cmd->add_option("--data", a.data, "Test dataset file")->required();
    cmd->add_option("--threshold", a.threshold, "Classification threshold");
    cmd->add_option("--knn-k", a.knn_k, "Neighbors for KNN imputation");
    cmd->add_option("--out", a.out, "Output directory for metrics.csv");
    cmd->callback([&] {
        DatasetHandle ds;
        if (auto st = tarnn_dataset_load(a.data.c_str(), &ds.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.data);
            return;
        }
        std::string csv = "model,scenario,n,tp,fp,tn,fn,f2,sensitivity,auc\n";
        std::vector<double> f2s, sens, aucs;
        for (const auto& path : a.models) {
            ModelHandle model;
            if (auto st = tarnn_model_load(path.c_str(), &model.p); st != TARNN_OK) {
                rc = fail(st, "load " + path);
                return;
            }
            tarnn_model_info info{};
            tarnn_model_get_info(model.p, &info);
            std::ostringstream scenario;
            scenario << info.window_m << "->" << info.horizon;
            tarnn_metrics m{};
            if (auto st = tarnn_evaluate(model.p, ds.p, a.threshold, a.knn_k, &m);
                st != TARNN_OK) {
                rc = fail(st, "evaluate " + path);
                return;
            }
            // file name only: keeps metrics.csv reproducible across run dirs
            csv += metrics_row(fs::path(path).filename().string(), scenario.str(), m);
            f2s.push_back(m.f2);
            sens.push_back(m.sensitivity);
            if (m.auc_defined)
                aucs.push_back(m.auc);
        }
        if (a.models.size() > 1) {
            auto mean = [](const std::vector<double>& v) {
                double s = 0.0;
                for (double x : v)
                    s += x;
                return v.empty() ? 0.0 : s / static_cast<double>(v.size());
            };
            auto sd = [&](const std::vector<double>& v) {
                if (v.size() < 2)
                    return 0.0;
                const double mu = mean(v);
                double s = 0.0;
                for (double x : v)
                    s += (x - mu) * (x - mu);
                return std::sqrt(s / static_cast<double>(v.size() - 1));
            };
            csv += "mean,,,,,,," + fixed6(mean(f2s)) + "," + fixed6(mean(sens)) + "," +
                   (aucs.empty() ? "" : fixed6(mean(aucs))) + "\n";
            csv += "sd,,,,,,," + fixed6(sd(f2s)) + "," + fixed6(sd(sens)) + "," +
                   (aucs.empty() ? "" : fixed6(sd(aucs))) + "\n";
        }
        fs::create_directories(a.out);
        write_file(fs::path(a.out) / "metrics.csv", csv);
        std::fputs(csv.c_str(), stdout);
    });
}

// ------------------------------------------------------------------ ablate --

struct AblateArgs {
    std::string data, test, out = ".", config;
    std::vector<std::uint64_t> ms{3};
    std::uint64_t n = 1;
    std::vector<std::uint64_t> seeds{0, 1, 2};
    double threshold = 0.5;
    TrainArgs base;
};

// training knobs shared by every ablation run; scenario keys are forced per run
std::vector<KeyBinding> ablate_shared_bindings(const TrainArgs& a) {
    return {
        {"cell", "--cell", [&a] { return a.cell; }},
        {"hidden", "--hidden", [&a] { return std::to_string(a.hidden); }},
        {"embedding", "--embedding", [&a] { return std::to_string(a.embedding); }},
        {"mlp_hidden", "--mlp-hidden", [&a] { return std::to_string(a.mlp_hidden); }},
        {"dropout", "--dropout", [&a] { return num(a.dropout); }},
        {"l2", "--l2", [&a] { return num(a.l2); }},
        {"epochs", "--epochs", [&a] { return std::to_string(a.epochs); }},
        {"batch", "--batch", [&a] { return std::to_string(a.batch); }},
        {"lr", "--lr", [&a] { return num(a.lr); }},
        {"delta", "--delta", [&a] { return num(a.delta); }},
        {"knn_k", "--knn-k", [&a] { return std::to_string(a.knn_k); }},
        {"exclude", "--exclude", [&a] { return join(a.exclude); }},
        {"use_demographics", "--no-demographics",
         [&a] { return a.no_demographics ? "false" : "true"; }},
    };
}

void add_ablate(CLI::App& app, AblateArgs& a, int& rc) {
    auto* cmd = app.add_subcommand(
        "ablate", "Train and compare the full model against its A- and T- ablations");
    cmd->add_option("--config", a.config, "Config file with key=value lines");
    cmd->add_option("--data", a.data, "Training dataset file")->required();
    cmd->add_option("--test", a.test, "Test dataset file")->required();
    cmd->add_option("--m", a.ms, "Window lengths (repeatable)")->delimiter(',');
    cmd->add_option("--n", a.n, "Prediction horizon");
    cmd->add_option("--seeds", a.seeds, "Training seeds shared by every variant")->delimiter(',');
    cmd->add_option("--threshold", a.threshold, "Classification threshold");
    cmd->add_option("--out", a.out, "Output directory");
    cmd->add_option("--cell", a.base.cell, "RNN cell: gru, lstm, bigru, bilstm");
    cmd->add_option("--hidden", a.base.hidden, "RNN hidden size");
    cmd->add_option("--embedding", a.base.embedding, "Embedding size d_model (0 = feature count)");
    cmd->add_option("--mlp-hidden", a.base.mlp_hidden, "Prediction-head hidden size");
    cmd->add_option("--dropout", a.base.dropout, "Dropout rate");
    cmd->add_option("--l2", a.base.l2, "L2 penalty");
    cmd->add_option("--epochs", a.base.epochs, "Training epochs");
    cmd->add_option("--batch", a.base.batch, "Mini-batch size");
    cmd->add_option("--lr", a.base.lr, "Adam learning rate");
    cmd->add_option("--delta", a.base.delta, "Positive-class loss weight");
    cmd->add_option("--knn-k", a.base.knn_k, "Neighbors for KNN imputation");
    cmd->add_option("--exclude", a.base.exclude, "Feature names to drop")->delimiter(',');
    cmd->add_flag("--no-demographics", a.base.no_demographics, "Ignore demographic features");
    cmd->callback([&, cmd] {
        DatasetHandle train_ds, test_ds;
        if (auto st = tarnn_dataset_load(a.data.c_str(), &train_ds.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.data);
            return;
        }
        if (auto st = tarnn_dataset_load(a.test.c_str(), &test_ds.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.test);
            return;
        }
        const std::string shared_cfg =
            read_config_file(a.config) + flag_overrides(cmd, ablate_shared_bindings(a.base));
        const std::vector<std::string> roles = {"ta", "a", "t"};
        std::string runs_csv = "variant,m,n,seed,f2,sensitivity,auc\n";
        // cell[variant][scenario] -> per-seed F2
        std::vector<std::vector<std::vector<double>>> f2(
            roles.size(), std::vector<std::vector<double>>(a.ms.size()));
        for (std::size_t vi = 0; vi < roles.size(); ++vi) {
            const std::string variant = roles[vi] + (a.n > 1 ? "-rnn-ae" : "-rnn");
            for (std::size_t mi = 0; mi < a.ms.size(); ++mi) {
                for (std::uint64_t seed : a.seeds) {
                    std::ostringstream run_cfg;
                    run_cfg << shared_cfg << "m=" << a.ms[mi] << "\nn=" << a.n
                            << "\nvariant=" << variant << "\nseed=" << seed << "\n";
                    ModelHandle model;
                    if (auto st = tarnn_train(train_ds.p, nullptr, run_cfg.str().c_str(),
                                              &model.p, nullptr);
                        st != TARNN_OK) {
                        rc = fail(st, "train " + variant);
                        return;
                    }
                    tarnn_metrics m{};
                    if (auto st = tarnn_evaluate(model.p, test_ds.p, a.threshold, a.base.knn_k,
                                                 &m);
                        st != TARNN_OK) {
                        rc = fail(st, "evaluate " + variant);
                        return;
                    }
                    std::ostringstream row;
                    row << variant << "," << a.ms[mi] << "," << a.n << "," << seed << ","
                        << fixed6(m.f2) << "," << fixed6(m.sensitivity) << ","
                        << (m.auc_defined ? fixed6(m.auc) : "") << "\n";
                    runs_csv += row.str();
                    f2[vi][mi].push_back(m.f2);
                }
            }
        }
        std::string table = "variant";
        for (std::uint64_t m : a.ms) {
            std::ostringstream h;
            h << "," << m << "->" << a.n;
            table += h.str();
        }
        table += "\n";
        for (std::size_t vi = 0; vi < roles.size(); ++vi) {
            const std::string variant = roles[vi] + (a.n > 1 ? "-rnn-ae" : "-rnn");
            table += variant;
            for (std::size_t mi = 0; mi < a.ms.size(); ++mi) {
                const auto& v = f2[vi][mi];
                double mu = 0.0;
                for (double x : v)
                    mu += x;
                mu /= static_cast<double>(v.size());
                double var = 0.0;
                for (double x : v)
                    var += (x - mu) * (x - mu);
                const double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1.0)) : 0.0;
                table += "," + fixed6(mu) + "+/-" + fixed6(sd);
            }
            table += "\n";
        }
        fs::create_directories(a.out);
        write_file(fs::path(a.out) / "ablation_runs.csv", runs_csv);
        write_file(fs::path(a.out) / "ablation.csv", table);
        std::fputs(table.c_str(), stdout);
    });
}

// ----------------------------------------------------------------- explain --

struct ExplainArgs {
    std::string model, data, out = "explain_out";
    std::uint64_t knn_k = 5;
    bool heatmap = false;
};

void add_explain(CLI::App& app, ExplainArgs& a, int& rc) {
    auto* cmd =
        app.add_subcommand("explain", "Write attention-weight reports for every test window");
    cmd->add_option("--model", a.model, "Model artifact")->required();
    cmd->add_option("--data", a.data, "Dataset file")->required();
    cmd->add_option("--out", a.out, "Output directory for the CSV reports");
    cmd->add_option("--knn-k", a.knn_k, "Neighbors for KNN imputation");
    cmd->add_flag("--heatmap", a.heatmap, "Also write a PGM heatmap of the mean combined matrix");
    cmd->callback([&] {
        ModelHandle model;
        if (auto st = tarnn_model_load(a.model.c_str(), &model.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.model);
            return;
        }
        DatasetHandle ds;
        if (auto st = tarnn_dataset_load(a.data.c_str(), &ds.p); st != TARNN_OK) {
            rc = fail(st, "load " + a.data);
            return;
        }
        if (auto st = tarnn_explain_to_dir(model.p, ds.p, a.knn_k, a.out.c_str(),
                                           a.heatmap ? 1 : 0);
            st != TARNN_OK) {
            rc = fail(st, "explain");
            return;
        }
        std::printf("attention reports written to %s\n", a.out.c_str());
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TA-RNN: time-aware recurrent models for irregular clinical visit sequences"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tarnn_version());

    int rc = 0;
    GenerateArgs gen;
    TrainArgs train;
    EvaluateArgs eval;
    AblateArgs ablate;
    ExplainArgs explain;
    add_generate(app, gen, rc);
    add_train(app, train, rc);
    add_evaluate(app, eval, rc);
    add_ablate(app, ablate, rc);
    add_explain(app, explain, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "tarnn: %s\n", e.what());
        return 2; // usage
    }
    return rc;
}
