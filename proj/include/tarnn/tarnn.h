/* tarnn.h - C interface to the TA-RNN clinical-outcome prediction library.
 *
 * All functions return TARNN_OK on success; on failure they return a status
 * code and leave a message retrievable via tarnn_last_error() (thread-local).
 * Objects created by the library are released with the matching *_free call.
 */
#ifndef TARNN_H
#define TARNN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TARNN_API __declspec(dllexport)
#else
#define TARNN_API __attribute__((visibility("default")))
#endif

typedef struct tarnn_dataset tarnn_dataset;
typedef struct tarnn_model tarnn_model;

typedef enum tarnn_status {
    TARNN_OK = 0,
    TARNN_ERROR = 1,       /* unexpected failure */
    TARNN_ERR_USAGE = 2,   /* invalid configuration or arguments */
    TARNN_ERR_DATA = 3,    /* malformed files, schema or unit mismatches */
    TARNN_ERR_NUMERIC = 4  /* non-finite loss or gradients */
} tarnn_status;

typedef struct tarnn_metrics {
    double f2;
    double sensitivity;
    double auc; /* valid only when auc_defined != 0 */
    int auc_defined;
    long long tp, fp, tn, fn;
    unsigned long long n;
} tarnn_metrics;

typedef struct tarnn_model_info {
    unsigned long long window_m;
    unsigned long long horizon;
    unsigned long long d_model;
    unsigned long long hidden_size;
    unsigned long long feature_count;
    unsigned long long demographic_size;
    double et_max;
    char variant[16];
    char cell[8];
    char unit[8];
} tarnn_model_info;

TARNN_API const char* tarnn_version(void);
TARNN_API const char* tarnn_last_error(void);
TARNN_API void tarnn_string_free(char* s);
TARNN_API void tarnn_buffer_free(void* p);

/* Datasets. Generation takes key=value lines (patients, features,
 * signal_features, demographics, min_visits, max_visits, gap_log_mean,
 * gap_log_sigma, gap_min, gap_max, severity_start_max, severity_rate_min,
 * severity_rate_max, severity_noise, feature_noise, missing_rate,
 * hazard_severity, hazard_time, hazard_bias, unit, seed). */
TARNN_API tarnn_status tarnn_dataset_generate(const char* config_text, tarnn_dataset** out);
TARNN_API tarnn_status tarnn_dataset_load(const char* path, tarnn_dataset** out);
TARNN_API tarnn_status tarnn_dataset_save(const tarnn_dataset* ds, const char* path);
/* Generator provenance card; empty for datasets loaded from disk. */
TARNN_API tarnn_status tarnn_dataset_card(const tarnn_dataset* ds, char** out_text);
TARNN_API unsigned long long tarnn_dataset_patient_count(const tarnn_dataset* ds);
TARNN_API void tarnn_dataset_free(tarnn_dataset* ds);

/* Training. config_text keys: m, n, variant, cell, hidden, embedding (0 keeps
 * the feature count), mlp_hidden, dropout, l2, epochs, batch, lr, delta, seed,
 * knn_k, exclude (comma-separated feature names), use_demographics. Preprocess
 * (imputation, scaling) and windowing happen inside. The optional validation
 * dataset adds per-epoch metrics to the history CSV. */
TARNN_API tarnn_status tarnn_train(const tarnn_dataset* train_data,
                                   const tarnn_dataset* validation_or_null,
                                   const char* config_text, tarnn_model** out_model,
                                   char** out_history_csv);

TARNN_API tarnn_status tarnn_model_save(const tarnn_model* model, const char* path);
TARNN_API tarnn_status tarnn_model_load(const char* path, tarnn_model** out);
TARNN_API tarnn_status tarnn_model_get_info(const tarnn_model* model, tarnn_model_info* out);
TARNN_API void tarnn_model_free(tarnn_model* model);

/* Inference over every qualifying window of a dataset (knn_k = 0 picks the
 * default imputation neighborhood of 5). Arrays are released with
 * tarnn_buffer_free. */
TARNN_API tarnn_status tarnn_predict(const tarnn_model* model, const tarnn_dataset* data,
                                     size_t knn_k, double** out_scores, int** out_labels,
                                     size_t* out_count);
TARNN_API tarnn_status tarnn_evaluate(const tarnn_model* model, const tarnn_dataset* data,
                                      double threshold, size_t knn_k, tarnn_metrics* out);

/* Attention reports: per-sample visit weights, feature weights and their
 * element-wise combination as CSV files under out_dir, plus cohort means and
 * an optional PGM heatmap of the mean combined matrix. */
TARNN_API tarnn_status tarnn_explain_to_dir(const tarnn_model* model, const tarnn_dataset* data,
                                            size_t knn_k, const char* out_dir,
                                            int write_heatmaps);
/* Weights for one window: alpha has window_m entries, beta and combined are
 * row-major window_m x d_model buffers. Any output pointer may be NULL. */
TARNN_API tarnn_status tarnn_explain_sample(const tarnn_model* model, const tarnn_dataset* data,
                                            size_t knn_k, size_t window_index, double* alpha,
                                            double* beta, double* combined);

#ifdef __cplusplus
}
#endif

#endif /* TARNN_H */
