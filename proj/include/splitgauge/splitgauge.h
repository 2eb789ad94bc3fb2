/*
 * splitgauge - split-integrity auditing for benchmark datasets.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed by the library; every fallible call returns an sg_status and
 * leaves a human-readable message in sg_last_error() (thread-local) on
 * failure. Strings and buffers returned through out-parameters are owned by
 * the caller and must be released with sg_string_free / sg_buffer_free.
 */

#ifndef SPLITGAUGE_H
#define SPLITGAUGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SG_API __declspec(dllexport)
#else
#define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t sg_status;

enum {
    SG_OK = 0,
    SG_ERR_IO = 1,          /* file missing, short read, write failure */
    SG_ERR_FORMAT = 2,      /* magic/structure violation in a container */
    SG_ERR_UNSUPPORTED = 3, /* recognized but unsupported variant (e.g. HDF5 .mat) */
    SG_ERR_VALIDATION = 4,  /* data fails a documented invariant */
    SG_ERR_CAPACITY = 5,    /* requested sizes exceed the inputs */
    SG_ERR_ARG = 6,         /* null pointer or malformed argument */
    SG_ERR_INTERNAL = 7,
};

/* Message describing the most recent failure on this thread. Never NULL. */
SG_API const char* sg_last_error(void);

SG_API const char* sg_version(void);

SG_API void sg_string_free(char* s);
SG_API void sg_buffer_free(void* p);

/* ------------------------------------------------------------------ */
/* Datasets (labeled image tensors)                                   */
/* ------------------------------------------------------------------ */

typedef struct sg_dataset sg_dataset;

SG_API sg_status sg_dataset_read_raw(const char* path, sg_dataset** out);
SG_API sg_status sg_dataset_read_svhn_mat(const char* path, int remap_label_ten,
                                          sg_dataset** out);
SG_API sg_status sg_dataset_write_raw(const sg_dataset* data, const char* path);
SG_API sg_status sg_dataset_dims(const sg_dataset* data, uint32_t* n, uint32_t* h,
                                 uint32_t* w, uint32_t* c, uint32_t* class_count);
/* Copies all N labels into caller-provided storage of length N. */
SG_API sg_status sg_dataset_labels(const sg_dataset* data, uint32_t* labels_out);
SG_API void sg_dataset_free(sg_dataset* data);

/* ------------------------------------------------------------------ */
/* Feature matrices                                                   */
/* ------------------------------------------------------------------ */

typedef struct sg_features sg_features;

SG_API sg_status sg_features_load(const char* path, sg_features** out);
/* dtype: 0 = f32, 1 = f64 payload. */
SG_API sg_status sg_features_save(const sg_features* f, const char* path, int dtype);
SG_API sg_status sg_features_dims(const sg_features* f, uint64_t* n, uint64_t* d);
SG_API void sg_features_free(sg_features* f);

/* Deterministic reference embedder: per-channel patch means on a
 * pooled_h x pooled_w grid, seeded Gaussian projection to projection_dim,
 * elementwise tanh. */
SG_API sg_status sg_embed_reference(const sg_dataset* data, uint32_t pooled_h,
                                    uint32_t pooled_w, uint32_t projection_dim,
                                    uint64_t seed, int threads, sg_features** out);

/* ------------------------------------------------------------------ */
/* Probability matrices and Inception Score                           */
/* ------------------------------------------------------------------ */

typedef struct sg_probs sg_probs;

SG_API sg_status sg_probs_read(const char* path, sg_probs** out);
SG_API sg_status sg_probs_dims(const sg_probs* p, uint64_t* n, uint64_t* k);
SG_API void sg_probs_free(sg_probs* p);

/* JSON payload with score, mean_kl, marginal, and per-fold scores when
 * folds > 1. */
SG_API sg_status sg_inception_score(const sg_probs* p, int folds, char** json_out);

/* ------------------------------------------------------------------ */
/* Split audit                                                        */
/* ------------------------------------------------------------------ */

/* Runs the multi-seed subset-FID protocol and returns the full report as a
 * JSON payload (per-seed rows, aggregates, gap_ratio, z_gap, verdict).
 * jitter adds eps * I to covariances before the distance (0 disables). */
SG_API sg_status sg_audit(const sg_features* train, const sg_features* test,
                          uint32_t m, const uint64_t* seeds, size_t n_seeds,
                          double tau, double tau_low, double z_min, double jitter,
                          int threads, char** json_out);

/* ------------------------------------------------------------------ */
/* Remix                                                              */
/* ------------------------------------------------------------------ */

/* Builds a stratified remix plan from label vectors; the plan JSON is
 * {"seed": ..., "new_train": [[split, index], ...], "new_test": [...]} with
 * split 0 = train, 1 = test. */
SG_API sg_status sg_remix_plan(const uint32_t* train_labels, size_t train_n,
                               const uint32_t* test_labels, size_t test_n,
                               uint32_t class_count, uint64_t seed, char** json_out);

SG_API sg_status sg_remix_apply(const char* plan_json, const sg_dataset* train,
                                const sg_dataset* test, sg_dataset** new_train,
                                sg_dataset** new_test);

/* Feature-space variant; label arrays follow the row order of each matrix.
 * new_*_labels receive malloc'd arrays (sg_buffer_free) of the same sizes. */
SG_API sg_status sg_remix_apply_features(const char* plan_json, const sg_features* train,
                                         const sg_features* test,
                                         const uint32_t* train_labels, size_t train_n,
                                         const uint32_t* test_labels, size_t test_n,
                                         sg_features** new_train, sg_features** new_test,
                                         uint32_t** new_train_labels,
                                         uint32_t** new_test_labels);

/* ------------------------------------------------------------------ */
/* Density probe (GMM + bits per dimension)                           */
/* ------------------------------------------------------------------ */

typedef struct sg_gmm sg_gmm;

/* reg < 0 selects the default 1e-6 * mean data variance. */
SG_API sg_status sg_gmm_fit(const sg_features* f, uint32_t k, uint64_t seed, double tol,
                            uint32_t max_iter, double reg, int diagonal, int threads,
                            sg_gmm** out);
SG_API sg_status sg_gmm_to_json(const sg_gmm* model, char** json_out);
SG_API sg_status sg_gmm_from_json(const char* json_text, sg_gmm** out);
SG_API void sg_gmm_free(sg_gmm* model);

SG_API sg_status sg_bpd(const sg_gmm* model, const sg_features* f, int threads,
                        double* bpd_out, double* mean_nll_nats_out);

/* ------------------------------------------------------------------ */
/* Synthetic benchmarks                                               */
/* ------------------------------------------------------------------ */

/* spec_json: {"seed": u64, "n": u64, "components": [{"weight": w,
 * "mean": [...], "cov": scalar | diag array | full matrix}, ...]}. */
SG_API sg_status sg_synth_features(const char* spec_json, sg_features** out);

/* mode: "none", "density_skew" or "subpop_drop". Labels are component
 * indices, returned as malloc'd arrays (sg_buffer_free). */
SG_API sg_status sg_synth_mismatch(const char* spec_json, const char* mode,
                                   double strength, uint64_t n_train, uint64_t n_test,
                                   uint64_t seed, sg_features** train, sg_features** test,
                                   uint32_t** train_labels, uint32_t** test_labels);

/* Pixel-space bench: class_count constant-intensity classes plus Gaussian
 * noise, for exercising the dataset -> embedder -> audit path. */
SG_API sg_status sg_synth_pixel(uint32_t class_count, uint32_t height, uint32_t width,
                                uint32_t channels, double noise_sigma, const char* mode,
                                double strength, uint64_t n_train, uint64_t n_test,
                                uint64_t seed, sg_dataset** train, sg_dataset** test);

#ifdef __cplusplus
}
#endif

#endif /* SPLITGAUGE_H */
