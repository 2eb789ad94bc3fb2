#include "splitgauge/splitgauge.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "density_probe.hpp"
#include "embedder.hpp"
#include "error.hpp"
#include "remixer.hpp"
#include "report_json.hpp"
#include "score_metrics.hpp"
#include "split_audit.hpp"
#include "synth_bench.hpp"
#include "tensor_io.hpp"
#include "types.hpp"

using namespace splitgauge;

struct sg_dataset {
    Dataset value;
};
struct sg_features {
    FeatureMatrix value;
};
struct sg_probs {
    ProbMatrix value;
};
struct sg_gmm {
    GmmModel value;
};

namespace {

thread_local std::string t_last_error = "no error";

sg_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io: return SG_ERR_IO;
        case ErrorKind::format: return SG_ERR_FORMAT;
        case ErrorKind::unsupported: return SG_ERR_UNSUPPORTED;
        case ErrorKind::validation: return SG_ERR_VALIDATION;
        case ErrorKind::capacity: return SG_ERR_CAPACITY;
        case ErrorKind::internal: return SG_ERR_INTERNAL;
    }
    return SG_ERR_INTERNAL;
}

// Runs the body, translating exceptions into status codes + last_error.
template <typename Fn>
sg_status guarded(Fn&& fn) {
    try {
        fn();
        return SG_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        t_last_error = "out of memory";
        return SG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return SG_ERR_INTERNAL;
    }
}

sg_status require(bool ok, const char* what) {
    if (ok)
        return SG_OK;
    t_last_error = std::string("invalid argument: ") + what;
    return SG_ERR_ARG;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

uint32_t* dup_labels(const std::vector<uint32_t>& v) {
    uint32_t* out = static_cast<uint32_t*>(
        std::malloc(sizeof(uint32_t) * std::max<size_t>(v.size(), 1)));
    if (!out)
        throw std::bad_alloc();
    if (!v.empty())
        std::memcpy(out, v.data(), sizeof(uint32_t) * v.size());
    return out;
}

}  // namespace

extern "C" {

const char* sg_last_error(void) { return t_last_error.c_str(); }

const char* sg_version(void) { return "0.1.0"; }

void sg_string_free(char* s) { std::free(s); }
void sg_buffer_free(void* p) { std::free(p); }

/* ---------------- datasets ---------------- */

sg_status sg_dataset_read_raw(const char* path, sg_dataset** out) {
    if (sg_status s = require(path && out, "path/out"); s != SG_OK) return s;
    return guarded([&] { *out = new sg_dataset{io::read_raw(path)}; });
}

sg_status sg_dataset_read_svhn_mat(const char* path, int remap_label_ten, sg_dataset** out) {
    if (sg_status s = require(path && out, "path/out"); s != SG_OK) return s;
    return guarded([&] { *out = new sg_dataset{io::read_svhn_mat(path, remap_label_ten != 0)}; });
}

sg_status sg_dataset_write_raw(const sg_dataset* data, const char* path) {
    if (sg_status s = require(data && path, "data/path"); s != SG_OK) return s;
    return guarded([&] { io::write_raw(path, data->value); });
}

sg_status sg_dataset_dims(const sg_dataset* data, uint32_t* n, uint32_t* h, uint32_t* w,
                          uint32_t* c, uint32_t* class_count) {
    if (sg_status s = require(data != nullptr, "data"); s != SG_OK) return s;
    if (n) *n = static_cast<uint32_t>(data->value.size());
    if (h) *h = data->value.height;
    if (w) *w = data->value.width;
    if (c) *c = data->value.channels;
    if (class_count) *class_count = data->value.class_count;
    return SG_OK;
}

sg_status sg_dataset_labels(const sg_dataset* data, uint32_t* labels_out) {
    if (sg_status s = require(data && labels_out, "data/labels_out"); s != SG_OK) return s;
    if (!data->value.labels.empty())
        std::memcpy(labels_out, data->value.labels.data(),
                    sizeof(uint32_t) * data->value.labels.size());
    return SG_OK;
}

void sg_dataset_free(sg_dataset* data) { delete data; }

/* ---------------- features ---------------- */

sg_status sg_features_load(const char* path, sg_features** out) {
    if (sg_status s = require(path && out, "path/out"); s != SG_OK) return s;
    return guarded([&] { *out = new sg_features{io::load_features(path)}; });
}

sg_status sg_features_save(const sg_features* f, const char* path, int dtype) {
    if (sg_status s = require(f && path && (dtype == 0 || dtype == 1), "f/path/dtype");
        s != SG_OK)
        return s;
    return guarded([&] { io::save_features(path, f->value, dtype == 0); });
}

sg_status sg_features_dims(const sg_features* f, uint64_t* n, uint64_t* d) {
    if (sg_status s = require(f != nullptr, "f"); s != SG_OK) return s;
    if (n) *n = static_cast<uint64_t>(f->value.rows());
    if (d) *d = static_cast<uint64_t>(f->value.dim());
    return SG_OK;
}

void sg_features_free(sg_features* f) { delete f; }

sg_status sg_embed_reference(const sg_dataset* data, uint32_t pooled_h, uint32_t pooled_w,
                             uint32_t projection_dim, uint64_t seed, int threads,
                             sg_features** out) {
    if (sg_status s = require(data && out, "data/out"); s != SG_OK) return s;
    return guarded([&] {
        EmbedderConfig cfg{pooled_h, pooled_w, projection_dim, seed};
        *out = new sg_features{embed_reference(data->value, cfg, threads)};
    });
}

/* ---------------- probs / IS ---------------- */

sg_status sg_probs_read(const char* path, sg_probs** out) {
    if (sg_status s = require(path && out, "path/out"); s != SG_OK) return s;
    return guarded([&] { *out = new sg_probs{io::read_probs(path)}; });
}

sg_status sg_probs_dims(const sg_probs* p, uint64_t* n, uint64_t* k) {
    if (sg_status s = require(p != nullptr, "p"); s != SG_OK) return s;
    if (n) *n = static_cast<uint64_t>(p->value.count());
    if (k) *k = static_cast<uint64_t>(p->value.classes());
    return SG_OK;
}

void sg_probs_free(sg_probs* p) { delete p; }

sg_status sg_inception_score(const sg_probs* p, int folds, char** json_out) {
    if (sg_status s = require(p && json_out, "p/json_out"); s != SG_OK) return s;
    return guarded([&] {
        IsResult whole = inception_score(p->value);
        std::vector<IsResult> per_fold;
        if (folds > 1)
            per_fold = inception_score_folds(p->value, folds);
        *json_out = dup_string(is_result_to_json(whole, per_fold));
    });
}

/* ---------------- audit ---------------- */

sg_status sg_audit(const sg_features* train, const sg_features* test, uint32_t m,
                   const uint64_t* seeds, size_t n_seeds, double tau, double tau_low,
                   double z_min, double jitter, int threads, char** json_out) {
    if (sg_status s = require(train && test && seeds && n_seeds > 0 && json_out,
                              "train/test/seeds/json_out");
        s != SG_OK)
        return s;
    return guarded([&] {
        AuditConfig cfg;
        cfg.m = m;
        cfg.seeds.assign(seeds, seeds + n_seeds);
        cfg.rule = DecisionRule{tau, z_min, tau_low};
        cfg.jitter = jitter;
        cfg.threads = threads;
        AuditReport report = audit(train->value, test->value, cfg);
        *json_out = dup_string(audit_report_to_json(report));
    });
}

/* ---------------- remix ---------------- */

sg_status sg_remix_plan(const uint32_t* train_labels, size_t train_n,
                        const uint32_t* test_labels, size_t test_n, uint32_t class_count,
                        uint64_t seed, char** json_out) {
    if (sg_status s = require((train_labels || train_n == 0) && (test_labels || test_n == 0) &&
                                  json_out,
                              "labels/json_out");
        s != SG_OK)
        return s;
    return guarded([&] {
        std::vector<uint32_t> tr(train_labels, train_labels + train_n);
        std::vector<uint32_t> te(test_labels, test_labels + test_n);
        RemixPlan plan = remix(tr, te, class_count, seed);
        *json_out = dup_string(remix_plan_to_json(plan));
    });
}

sg_status sg_remix_apply(const char* plan_json, const sg_dataset* train,
                         const sg_dataset* test, sg_dataset** new_train,
                         sg_dataset** new_test) {
    if (sg_status s = require(plan_json && train && test && new_train && new_test,
                              "plan/train/test/outs");
        s != SG_OK)
        return s;
    return guarded([&] {
        RemixPlan plan = remix_plan_from_json(plan_json);
        auto [a, b] = apply_plan(plan, train->value, test->value);
        *new_train = new sg_dataset{std::move(a)};
        *new_test = new sg_dataset{std::move(b)};
    });
}

sg_status sg_remix_apply_features(const char* plan_json, const sg_features* train,
                                  const sg_features* test, const uint32_t* train_labels,
                                  size_t train_n, const uint32_t* test_labels, size_t test_n,
                                  sg_features** new_train, sg_features** new_test,
                                  uint32_t** new_train_labels, uint32_t** new_test_labels) {
    if (sg_status s =
            require(plan_json && train && test && (train_labels || train_n == 0) &&
                        (test_labels || test_n == 0) && new_train && new_test,
                    "plan/features/labels/outs");
        s != SG_OK)
        return s;
    return guarded([&] {
        RemixPlan plan = remix_plan_from_json(plan_json);
        std::vector<uint32_t> tr(train_labels, train_labels + train_n);
        std::vector<uint32_t> te(test_labels, test_labels + test_n);
        RemixedFeatures r = apply_plan_features(plan, train->value, test->value, tr, te);
        *new_train = new sg_features{std::move(r.train)};
        *new_test = new sg_features{std::move(r.test)};
        if (new_train_labels) *new_train_labels = dup_labels(r.train_labels);
        if (new_test_labels) *new_test_labels = dup_labels(r.test_labels);
    });
}

/* ---------------- density probe ---------------- */

sg_status sg_gmm_fit(const sg_features* f, uint32_t k, uint64_t seed, double tol,
                     uint32_t max_iter, double reg, int diagonal, int threads,
                     sg_gmm** out) {
    if (sg_status s = require(f && out, "f/out"); s != SG_OK) return s;
    return guarded([&] {
        GmmFitOptions opt;
        opt.k = k;
        opt.seed = seed;
        opt.tol = tol;
        opt.max_iter = max_iter;
        opt.reg = reg;
        opt.diagonal = diagonal != 0;
        opt.threads = threads;
        *out = new sg_gmm{fit_gmm(f->value, opt)};
    });
}

sg_status sg_gmm_to_json(const sg_gmm* model, char** json_out) {
    if (sg_status s = require(model && json_out, "model/json_out"); s != SG_OK) return s;
    return guarded([&] { *json_out = dup_string(gmm_to_json(model->value)); });
}

sg_status sg_gmm_from_json(const char* json_text, sg_gmm** out) {
    if (sg_status s = require(json_text && out, "json/out"); s != SG_OK) return s;
    return guarded([&] { *out = new sg_gmm{gmm_from_json(json_text)}; });
}

void sg_gmm_free(sg_gmm* model) { delete model; }

sg_status sg_bpd(const sg_gmm* model, const sg_features* f, int threads, double* bpd_out,
                 double* mean_nll_nats_out) {
    if (sg_status s = require(model && f && bpd_out, "model/f/bpd_out"); s != SG_OK)
        return s;
    return guarded([&] {
        BpdResult r = bpd(model->value, f->value, threads);
        *bpd_out = r.bpd;
        if (mean_nll_nats_out)
            *mean_nll_nats_out = r.mean_nll_nats;
    });
}

/* ---------------- synthetic benchmarks ---------------- */

sg_status sg_synth_features(const char* spec_json, sg_features** out) {
    if (sg_status s = require(spec_json && out, "spec/out"); s != SG_OK) return s;
    return guarded([&] {
        GeneratorSpec spec = generator_spec_from_json(spec_json);
        *out = new sg_features{gen_features(spec)};
    });
}

sg_status sg_synth_mismatch(const char* spec_json, const char* mode, double strength,
                            uint64_t n_train, uint64_t n_test, uint64_t seed,
                            sg_features** train, sg_features** test,
                            uint32_t** train_labels, uint32_t** test_labels) {
    if (sg_status s = require(spec_json && mode && train && test, "spec/mode/outs");
        s != SG_OK)
        return s;
    return guarded([&] {
        GeneratorSpec spec = generator_spec_from_json(spec_json);
        MismatchSplits r = inject_mismatch(spec, mismatch_mode_from_name(mode), strength,
                                           n_train, n_test, seed);
        *train = new sg_features{std::move(r.train)};
        *test = new sg_features{std::move(r.test)};
        if (train_labels) *train_labels = dup_labels(r.train_labels);
        if (test_labels) *test_labels = dup_labels(r.test_labels);
    });
}

sg_status sg_synth_pixel(uint32_t class_count, uint32_t height, uint32_t width,
                         uint32_t channels, double noise_sigma, const char* mode,
                         double strength, uint64_t n_train, uint64_t n_test, uint64_t seed,
                         sg_dataset** train, sg_dataset** test) {
    if (sg_status s = require(mode && train && test, "mode/outs"); s != SG_OK) return s;
    return guarded([&] {
        PixelBenchSpec spec{class_count, height, width, channels, noise_sigma};
        PixelSplits r = gen_pixel_mismatch(spec, mismatch_mode_from_name(mode), strength,
                                           n_train, n_test, seed);
        *train = new sg_dataset{std::move(r.train)};
        *test = new sg_dataset{std::move(r.test)};
    });
}

}  // extern "C"
