// splitgauge command-line driver. All dataset/metric work goes through the
// C API of the shared library; this file only parses flags, wires files
// together, and emits report envelopes.

#include <splitgauge/splitgauge.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitMismatch = 4;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
    throw CliError{code, message};
}

void check(sg_status status) {
    if (status != SG_OK)
        fail(kExitData, sg_last_error());
}

// RAII wrappers over the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    ~Handle() { reset(); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        if (this != &other) {
            reset();
            ptr = other.ptr;
            other.ptr = nullptr;
        }
        return *this;
    }
    void reset() {
        if (ptr) {
            Free(ptr);
            ptr = nullptr;
        }
    }
    T** out() {
        reset();
        return &ptr;
    }
    T* get() const { return ptr; }
    explicit operator bool() const { return ptr != nullptr; }
};

using DatasetHandle = Handle<sg_dataset, sg_dataset_free>;
using FeaturesHandle = Handle<sg_features, sg_features_free>;
using ProbsHandle = Handle<sg_probs, sg_probs_free>;
using GmmHandle = Handle<sg_gmm, sg_gmm_free>;

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { sg_string_free(s); }
    char** out() { return &s; }
    std::string str() const { return s ? std::string(s) : std::string(); }
};

struct OwnedLabels {
    uint32_t* p = nullptr;
    ~OwnedLabels() { sg_buffer_free(p); }
    uint32_t** out() { return &p; }
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(kExitData, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(kExitData, "cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        fail(kExitData, "write failed on '" + path + "'");
}

json load_config(const std::string& path) {
    if (path.empty())
        return json::object();
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        fail(kExitUsage, "config file '" + path + "': " + e.what());
    }
}

// Precedence: flags > config file > defaults. Called after parsing for every
// knob, so a config value only lands when the flag was not given.
template <typename T>
void cfg(CLI::App* cmd, const char* flag, const json& config, const char* key, T& target) {
    if (cmd->count(flag) == 0 && config.contains(key)) {
        try {
            target = config.at(key).get<T>();
        } catch (const json::exception&) {
            fail(kExitUsage, std::string("config key '") + key + "' has the wrong type");
        }
    }
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            fail(kExitUsage, "bad seed '" + item + "' in seed list");
        }
    }
    if (seeds.empty())
        fail(kExitUsage, "empty seed list");
    return seeds;
}

int resolve_threads(CLI::App* cmd, const json& config, int flag_value) {
    if (cmd->count("--threads") > 0)
        return flag_value;
    if (config.contains("threads"))
        return config.at("threads").get<int>();
    if (const char* env = std::getenv("SPLITGAUGE_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            fail(kExitUsage, "SPLITGAUGE_THREADS is not an integer");
        }
    }
    return flag_value;
}

uint64_t now_unix_ms() {
    using namespace std::chrono;
    return static_cast<uint64_t>(
        duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

json envelope(const std::string& command, const json& config_echo, json payload) {
    json env;
    env["schema_version"] = 1;
    env["tool_version"] = sg_version();
    env["command"] = command;
    env["created_unix_ms"] = now_unix_ms();
    env["config"] = config_echo;
    env["payload"] = std::move(payload);
    return env;
}

// Dataset loader that sniffs SGTD vs MATLAB containers by magic.
DatasetHandle load_dataset(const std::string& path, bool remap_label_ten) {
    DatasetHandle d;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(kExitData, "cannot open '" + path + "'");
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::string(magic, 8) == "SGTD0001")
        check(sg_dataset_read_raw(path.c_str(), d.out()));
    else
        check(sg_dataset_read_svhn_mat(path.c_str(), remap_label_ten ? 1 : 0, d.out()));
    return d;
}

std::vector<uint32_t> dataset_labels(const DatasetHandle& d) {
    uint32_t n = 0;
    check(sg_dataset_dims(d.get(), &n, nullptr, nullptr, nullptr, nullptr));
    std::vector<uint32_t> labels(n);
    if (n > 0)
        check(sg_dataset_labels(d.get(), labels.data()));
    return labels;
}

std::vector<uint32_t> labels_from_csv(const std::string& path) {
    std::vector<uint32_t> labels;
    std::ifstream in(path);
    if (!in)
        fail(kExitData, "cannot open '" + path + "'");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        size_t e = line.find_last_not_of(" \t\r");
        try {
            labels.push_back(static_cast<uint32_t>(std::stoul(line.substr(b, e - b + 1))));
        } catch (const std::exception&) {
            fail(kExitData, "'" + path + "' line " + std::to_string(lineno) +
                                ": not a nonnegative integer label");
        }
    }
    return labels;
}

void write_labels_csv(const std::string& path, const uint32_t* labels, size_t n) {
    std::ostringstream ss;
    for (size_t i = 0; i < n; ++i)
        ss << labels[i] << '\n';
    write_text_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// figure output
// ---------------------------------------------------------------------------

std::string audit_csv(const json& payload) {
    std::ostringstream ss;
    ss << "seed,fid_within,fid_cross\n";
    for (const json& row : payload.at("per_seed"))
        ss << row.at("seed").get<uint64_t>() << ',' << row.at("fid_within").get<double>()
           << ',' << row.at("fid_cross").get<double>() << '\n';
    return ss.str();
}

// Grouped bars, one pair (within, cross) per seed.
std::string audit_svg(const json& payload) {
    const json& rows = payload.at("per_seed");
    const int n = static_cast<int>(rows.size());
    const double width = 120.0 + n * 90.0, height = 320.0;
    const double plot_left = 70.0, plot_bottom = height - 50.0, plot_top = 30.0;
    double max_fid = 0.0;
    for (const json& row : rows)
        max_fid = std::max({max_fid, row.at("fid_within").get<double>(),
                            row.at("fid_cross").get<double>()});
    if (max_fid <= 0.0)
        max_fid = 1.0;
    double scale = (plot_bottom - plot_top) / (max_fid * 1.1);

    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    ss << "<text x=\"" << width / 2
       << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
          "FID within vs cross per seed</text>\n";
    ss << "<line x1=\"" << plot_left << "\" y1=\"" << plot_bottom << "\" x2=\"" << width - 20
       << "\" y2=\"" << plot_bottom << "\" stroke=\"black\"/>\n";
    ss << "<line x1=\"" << plot_left << "\" y1=\"" << plot_bottom << "\" x2=\"" << plot_left
       << "\" y2=\"" << plot_top << "\" stroke=\"black\"/>\n";
    for (int g = 0; g <= 4; ++g) {
        double v = max_fid * 1.1 * g / 4.0;
        double y = plot_bottom - v * scale;
        ss << "<text x=\"" << plot_left - 6 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
           << std::round(v * 100) / 100 << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        const json& row = rows[static_cast<size_t>(i)];
        double x0 = plot_left + 20.0 + i * 90.0;
        double hw = row.at("fid_within").get<double>() * scale;
        double hc = row.at("fid_cross").get<double>() * scale;
        ss << "<rect x=\"" << x0 << "\" y=\"" << plot_bottom - hw
           << "\" width=\"28\" height=\"" << hw << "\" fill=\"#4878cf\"/>\n";
        ss << "<rect x=\"" << x0 + 32 << "\" y=\"" << plot_bottom - hc
           << "\" width=\"28\" height=\"" << hc << "\" fill=\"#d65f5f\"/>\n";
        ss << "<text x=\"" << x0 + 30 << "\" y=\"" << plot_bottom + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">seed "
           << row.at("seed").get<uint64_t>() << "</text>\n";
    }
    ss << "<rect x=\"" << plot_left << "\" y=\"" << height - 24
       << "\" width=\"12\" height=\"12\" fill=\"#4878cf\"/>"
       << "<text x=\"" << plot_left + 16 << "\" y=\"" << height - 14
       << "\" font-family=\"sans-serif\" font-size=\"11\">within</text>\n";
    ss << "<rect x=\"" << plot_left + 80 << "\" y=\"" << height - 24
       << "\" width=\"12\" height=\"12\" fill=\"#d65f5f\"/>"
       << "<text x=\"" << plot_left + 96 << "\" y=\"" << height - 14
       << "\" font-family=\"sans-serif\" font-size=\"11\">cross</text>\n";
    ss << "</svg>\n";
    return ss.str();
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct EmbedArgs {
    std::string data, out, out_labels, config_path, dtype = "f64";
    uint32_t pool_h = 8, pool_w = 8, proj_dim = 64;
    uint64_t seed = 0;
    bool remap_label_ten = false;
    int threads = 1;
};

int run_embed(CLI::App* cmd, EmbedArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--data", config, "data", a.data);
    cfg(cmd, "--out", config, "out", a.out);
    cfg(cmd, "--pool-h", config, "pool_h", a.pool_h);
    cfg(cmd, "--pool-w", config, "pool_w", a.pool_w);
    cfg(cmd, "--proj-dim", config, "proj_dim", a.proj_dim);
    cfg(cmd, "--seed", config, "seed", a.seed);
    cfg(cmd, "--dtype", config, "dtype", a.dtype);
    a.threads = resolve_threads(cmd, config, a.threads);
    if (a.data.empty() || a.out.empty())
        fail(kExitUsage, "embed requires --data and --out");
    if (a.dtype != "f32" && a.dtype != "f64")
        fail(kExitUsage, "--dtype must be f32 or f64");

    DatasetHandle data = load_dataset(a.data, a.remap_label_ten);
    FeaturesHandle features;
    check(sg_embed_reference(data.get(), a.pool_h, a.pool_w, a.proj_dim, a.seed, a.threads,
                             features.out()));
    check(sg_features_save(features.get(), a.out.c_str(), a.dtype == "f32" ? 0 : 1));
    if (!a.out_labels.empty()) {
        std::vector<uint32_t> labels = dataset_labels(data);
        write_labels_csv(a.out_labels, labels.data(), labels.size());
    }
    uint64_t n = 0, d = 0;
    check(sg_features_dims(features.get(), &n, &d));
    std::printf("embedded %llu samples to %llu dims -> %s\n",
                static_cast<unsigned long long>(n), static_cast<unsigned long long>(d),
                a.out.c_str());
    return 0;
}

struct AuditArgs {
    std::string train_features, test_features, train, test;
    std::string seeds = "1,2,3,4,5";
    std::string out, csv, svg, config_path;
    uint32_t m = 10000;
    double tau = 1.5, tau_low = 1.2, z_min = 3.0, jitter = 0.0;
    uint32_t pool_h = 8, pool_w = 8, proj_dim = 64;
    uint64_t embed_seed = 0;
    bool remap_label_ten = false, fail_on_mismatch = false;
    int threads = 1;
};

int run_audit(CLI::App* cmd, AuditArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--train-features", config, "train_features", a.train_features);
    cfg(cmd, "--test-features", config, "test_features", a.test_features);
    cfg(cmd, "--train", config, "train", a.train);
    cfg(cmd, "--test", config, "test", a.test);
    cfg(cmd, "--m", config, "m", a.m);
    cfg(cmd, "--seeds", config, "seeds", a.seeds);
    cfg(cmd, "--tau", config, "tau", a.tau);
    cfg(cmd, "--tau-low", config, "tau_low", a.tau_low);
    cfg(cmd, "--z-min", config, "z_min", a.z_min);
    cfg(cmd, "--jitter", config, "jitter", a.jitter);
    cfg(cmd, "--pool-h", config, "pool_h", a.pool_h);
    cfg(cmd, "--pool-w", config, "pool_w", a.pool_w);
    cfg(cmd, "--proj-dim", config, "proj_dim", a.proj_dim);
    cfg(cmd, "--embed-seed", config, "embed_seed", a.embed_seed);
    cfg(cmd, "--out", config, "out", a.out);
    cfg(cmd, "--csv", config, "csv", a.csv);
    cfg(cmd, "--svg", config, "svg", a.svg);
    a.threads = resolve_threads(cmd, config, a.threads);

    bool from_features = !a.train_features.empty() || !a.test_features.empty();
    bool from_datasets = !a.train.empty() || !a.test.empty();
    if (from_features && from_datasets)
        fail(kExitUsage, "give either --train-features/--test-features or --train/--test, not both");
    if (!from_features && !from_datasets)
        fail(kExitUsage, "audit needs --train-features/--test-features or --train/--test");

    FeaturesHandle train_f, test_f;
    if (from_features) {
        if (a.train_features.empty() || a.test_features.empty())
            fail(kExitUsage, "both --train-features and --test-features are required");
        check(sg_features_load(a.train_features.c_str(), train_f.out()));
        check(sg_features_load(a.test_features.c_str(), test_f.out()));
    } else {
        if (a.train.empty() || a.test.empty())
            fail(kExitUsage, "both --train and --test are required");
        DatasetHandle train_d = load_dataset(a.train, a.remap_label_ten);
        DatasetHandle test_d = load_dataset(a.test, a.remap_label_ten);
        check(sg_embed_reference(train_d.get(), a.pool_h, a.pool_w, a.proj_dim, a.embed_seed,
                                 a.threads, train_f.out()));
        check(sg_embed_reference(test_d.get(), a.pool_h, a.pool_w, a.proj_dim, a.embed_seed,
                                 a.threads, test_f.out()));
    }

    std::vector<uint64_t> seeds = parse_seed_list(a.seeds);
    OwnedString payload_text;
    check(sg_audit(train_f.get(), test_f.get(), a.m, seeds.data(), seeds.size(), a.tau,
                   a.tau_low, a.z_min, a.jitter, a.threads, payload_text.out()));
    json payload = json::parse(payload_text.str());

    json config_echo = {{"train_features", a.train_features},
                        {"test_features", a.test_features},
                        {"train", a.train},
                        {"test", a.test},
                        {"m", a.m},
                        {"seeds", seeds},
                        {"tau", a.tau},
                        {"tau_low", a.tau_low},
                        {"z_min", a.z_min},
                        {"jitter", a.jitter},
                        {"pool_h", a.pool_h},
                        {"pool_w", a.pool_w},
                        {"proj_dim", a.proj_dim},
                        {"embed_seed", a.embed_seed},
                        {"threads", a.threads}};
    if (!a.out.empty())
        write_text_file(a.out, envelope("audit", config_echo, payload).dump(2) + "\n");
    if (!a.csv.empty())
        write_text_file(a.csv, audit_csv(payload));
    if (!a.svg.empty())
        write_text_file(a.svg, audit_svg(payload));

    std::printf("verdict: %s  (within %.4f +/- %.4f, cross %.4f +/- %.4f, ratio %.3f, z %.2f)\n",
                payload.at("verdict").get<std::string>().c_str(),
                payload.at("within_mean").get<double>(), payload.at("within_std").get<double>(),
                payload.at("cross_mean").get<double>(), payload.at("cross_std").get<double>(),
                payload.at("gap_ratio").get<double>(), payload.at("z_gap").get<double>());
    if (a.fail_on_mismatch && payload.at("verdict").get<std::string>() == "mismatch")
        return kExitMismatch;
    return 0;
}

struct IsArgs {
    std::string probs, out, config_path;
    int folds = 1;
};

int run_is(CLI::App* cmd, IsArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--probs", config, "probs", a.probs);
    cfg(cmd, "--folds", config, "folds", a.folds);
    cfg(cmd, "--out", config, "out", a.out);
    if (a.probs.empty())
        fail(kExitUsage, "is requires --probs");

    ProbsHandle probs;
    check(sg_probs_read(a.probs.c_str(), probs.out()));
    OwnedString payload_text;
    check(sg_inception_score(probs.get(), a.folds, payload_text.out()));
    json payload = json::parse(payload_text.str());

    if (!a.out.empty()) {
        json config_echo = {{"probs", a.probs}, {"folds", a.folds}};
        write_text_file(a.out, envelope("is", config_echo, payload).dump(2) + "\n");
    }
    std::printf("inception score: %.6f (mean KL %.6f)\n", payload.at("score").get<double>(),
                payload.at("mean_kl").get<double>());
    return 0;
}

struct RemixArgs {
    std::string train, test, train_labels, test_labels;
    std::string train_features, test_features;
    std::string out, report, config_path;
    std::string emit_train, emit_test, emit_train_features, emit_test_features;
    std::string emit_train_labels, emit_test_labels;
    uint32_t classes = 0;
    uint64_t seed = 1;
    bool remap_label_ten = false;
};

int run_remix(CLI::App* cmd, RemixArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--train", config, "train", a.train);
    cfg(cmd, "--test", config, "test", a.test);
    cfg(cmd, "--train-labels", config, "train_labels", a.train_labels);
    cfg(cmd, "--test-labels", config, "test_labels", a.test_labels);
    cfg(cmd, "--classes", config, "classes", a.classes);
    cfg(cmd, "--seed", config, "seed", a.seed);
    cfg(cmd, "--out", config, "out", a.out);
    if (a.out.empty())
        fail(kExitUsage, "remix requires --out for the plan");

    bool from_datasets = !a.train.empty() || !a.test.empty();
    bool from_label_files = !a.train_labels.empty() || !a.test_labels.empty();
    if (from_datasets == from_label_files)
        fail(kExitUsage, "give labels either as --train/--test datasets or as "
                         "--train-labels/--test-labels files");

    DatasetHandle train_d, test_d;
    std::vector<uint32_t> train_labels, test_labels;
    uint32_t class_count = a.classes;
    if (from_datasets) {
        if (a.train.empty() || a.test.empty())
            fail(kExitUsage, "both --train and --test are required");
        train_d = load_dataset(a.train, a.remap_label_ten);
        test_d = load_dataset(a.test, a.remap_label_ten);
        train_labels = dataset_labels(train_d);
        test_labels = dataset_labels(test_d);
        uint32_t ktr = 0, kte = 0;
        check(sg_dataset_dims(train_d.get(), nullptr, nullptr, nullptr, nullptr, &ktr));
        check(sg_dataset_dims(test_d.get(), nullptr, nullptr, nullptr, nullptr, &kte));
        class_count = std::max({class_count, ktr, kte});
    } else {
        if (a.train_labels.empty() || a.test_labels.empty())
            fail(kExitUsage, "both --train-labels and --test-labels are required");
        train_labels = labels_from_csv(a.train_labels);
        test_labels = labels_from_csv(a.test_labels);
        if (class_count == 0) {
            for (uint32_t l : train_labels) class_count = std::max(class_count, l + 1);
            for (uint32_t l : test_labels) class_count = std::max(class_count, l + 1);
        }
    }
    if (class_count == 0)
        class_count = 1;

    OwnedString plan_text;
    check(sg_remix_plan(train_labels.data(), train_labels.size(), test_labels.data(),
                        test_labels.size(), class_count, a.seed, plan_text.out()));
    write_text_file(a.out, plan_text.str() + "\n");

    if (!a.emit_train.empty() || !a.emit_test.empty()) {
        if (!from_datasets)
            fail(kExitUsage, "--emit-train/--emit-test need --train/--test datasets");
        if (a.emit_train.empty() || a.emit_test.empty())
            fail(kExitUsage, "both --emit-train and --emit-test are required");
        DatasetHandle new_train, new_test;
        check(sg_remix_apply(plan_text.str().c_str(), train_d.get(), test_d.get(),
                             new_train.out(), new_test.out()));
        check(sg_dataset_write_raw(new_train.get(), a.emit_train.c_str()));
        check(sg_dataset_write_raw(new_test.get(), a.emit_test.c_str()));
    }

    if (!a.emit_train_features.empty() || !a.emit_test_features.empty()) {
        if (a.train_features.empty() || a.test_features.empty())
            fail(kExitUsage,
                 "--emit-train-features/--emit-test-features need --train-features/--test-features");
        if (a.emit_train_features.empty() || a.emit_test_features.empty())
            fail(kExitUsage, "both --emit-train-features and --emit-test-features are required");
        FeaturesHandle train_f, test_f, new_train_f, new_test_f;
        check(sg_features_load(a.train_features.c_str(), train_f.out()));
        check(sg_features_load(a.test_features.c_str(), test_f.out()));
        OwnedLabels new_train_labels, new_test_labels;
        check(sg_remix_apply_features(plan_text.str().c_str(), train_f.get(), test_f.get(),
                                      train_labels.data(), train_labels.size(),
                                      test_labels.data(), test_labels.size(),
                                      new_train_f.out(), new_test_f.out(),
                                      new_train_labels.out(), new_test_labels.out()));
        check(sg_features_save(new_train_f.get(), a.emit_train_features.c_str(), 1));
        check(sg_features_save(new_test_f.get(), a.emit_test_features.c_str(), 1));
        if (!a.emit_train_labels.empty())
            write_labels_csv(a.emit_train_labels, new_train_labels.p, train_labels.size());
        if (!a.emit_test_labels.empty())
            write_labels_csv(a.emit_test_labels, new_test_labels.p, test_labels.size());
    }

    if (!a.report.empty()) {
        json payload = {{"seed", a.seed},
                        {"new_train_size", train_labels.size()},
                        {"new_test_size", test_labels.size()},
                        {"class_count", class_count}};
        json config_echo = {{"seed", a.seed}, {"classes", class_count}};
        write_text_file(a.report, envelope("remix", config_echo, payload).dump(2) + "\n");
    }
    std::printf("remix plan: %zu train + %zu test samples, seed %llu -> %s\n",
                train_labels.size(), test_labels.size(),
                static_cast<unsigned long long>(a.seed), a.out.c_str());
    return 0;
}

struct FitDensityArgs {
    std::string features, out, config_path;
    uint32_t k = 3;
    uint64_t seed = 0;
    double tol = 1e-6;
    uint32_t max_iter = 200;
    double reg = -1.0;
    bool diagonal = false;
    int threads = 1;
};

int run_fit_density(CLI::App* cmd, FitDensityArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--features", config, "features", a.features);
    cfg(cmd, "--k", config, "k", a.k);
    cfg(cmd, "--seed", config, "seed", a.seed);
    cfg(cmd, "--tol", config, "tol", a.tol);
    cfg(cmd, "--max-iter", config, "max_iter", a.max_iter);
    cfg(cmd, "--reg", config, "reg", a.reg);
    cfg(cmd, "--out", config, "out", a.out);
    a.threads = resolve_threads(cmd, config, a.threads);
    if (a.features.empty() || a.out.empty())
        fail(kExitUsage, "fit-density requires --features and --out");

    FeaturesHandle features;
    check(sg_features_load(a.features.c_str(), features.out()));
    GmmHandle model;
    check(sg_gmm_fit(features.get(), a.k, a.seed, a.tol, a.max_iter, a.reg,
                     a.diagonal ? 1 : 0, a.threads, model.out()));
    OwnedString model_text;
    check(sg_gmm_to_json(model.get(), model_text.out()));
    write_text_file(a.out, model_text.str() + "\n");

    json parsed = json::parse(model_text.str());
    const auto& trace = parsed.at("fit_trace");
    std::printf("fitted k=%u gmm in %zu iterations, final mean log-likelihood %.6f -> %s\n",
                a.k, trace.size(), trace.empty() ? 0.0 : trace.back().get<double>(),
                a.out.c_str());
    return 0;
}

struct BpdArgs {
    std::string model, features, train_features, test_features, out, config_path;
    int threads = 1;
};

int run_bpd(CLI::App* cmd, BpdArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--model", config, "model", a.model);
    cfg(cmd, "--features", config, "features", a.features);
    cfg(cmd, "--train-features", config, "train_features", a.train_features);
    cfg(cmd, "--test-features", config, "test_features", a.test_features);
    cfg(cmd, "--out", config, "out", a.out);
    a.threads = resolve_threads(cmd, config, a.threads);
    if (a.model.empty())
        fail(kExitUsage, "bpd requires --model");
    bool single = !a.features.empty();
    bool pair = !a.train_features.empty() || !a.test_features.empty();
    if (single == pair)
        fail(kExitUsage, "give either --features or --train-features/--test-features");

    GmmHandle model;
    check(sg_gmm_from_json(read_text_file(a.model).c_str(), model.out()));

    auto eval = [&](const std::string& path) {
        FeaturesHandle f;
        check(sg_features_load(path.c_str(), f.out()));
        uint64_t n = 0, d = 0;
        check(sg_features_dims(f.get(), &n, &d));
        double value = 0.0, nll = 0.0;
        check(sg_bpd(model.get(), f.get(), a.threads, &value, &nll));
        return json{{"bpd", value}, {"mean_nll_nats", nll}, {"n", n}, {"d", d}};
    };

    json payload;
    if (single) {
        payload = eval(a.features);
        std::printf("bpd: %.6f\n", payload.at("bpd").get<double>());
    } else {
        if (a.train_features.empty() || a.test_features.empty())
            fail(kExitUsage, "both --train-features and --test-features are required");
        json train = eval(a.train_features);
        json test = eval(a.test_features);
        payload = {{"train", train},
                   {"test", test},
                   {"bpd_gap", test.at("bpd").get<double>() - train.at("bpd").get<double>()}};
        std::printf("bpd train %.6f, test %.6f, gap %.6f\n", train.at("bpd").get<double>(),
                    test.at("bpd").get<double>(), payload.at("bpd_gap").get<double>());
    }
    if (!a.out.empty()) {
        json config_echo = {{"model", a.model},
                            {"features", a.features},
                            {"train_features", a.train_features},
                            {"test_features", a.test_features}};
        write_text_file(a.out, envelope("bpd", config_echo, payload).dump(2) + "\n");
    }
    return 0;
}

struct SynthArgs {
    std::string spec, mode = "none", config_path;
    std::string out, out_train, out_test, out_train_labels, out_test_labels;
    double strength = 0.0, noise_sigma = 12.0;
    uint64_t train_n = 0, test_n = 0, seed = 0;
    bool pixel = false;
    uint32_t classes = 3, height = 16, width = 16, channels = 3;
};

int run_synth(CLI::App* cmd, SynthArgs& a) {
    json config = load_config(a.config_path);
    cfg(cmd, "--spec", config, "spec", a.spec);
    cfg(cmd, "--mode", config, "mode", a.mode);
    cfg(cmd, "--strength", config, "strength", a.strength);
    cfg(cmd, "--train-n", config, "train_n", a.train_n);
    cfg(cmd, "--test-n", config, "test_n", a.test_n);
    cfg(cmd, "--seed", config, "seed", a.seed);

    if (a.pixel) {
        if (a.out_train.empty() || a.out_test.empty())
            fail(kExitUsage, "synth --pixel requires --out-train and --out-test");
        if (a.train_n == 0 || a.test_n == 0)
            fail(kExitUsage, "synth --pixel requires --train-n and --test-n");
        DatasetHandle train, test;
        check(sg_synth_pixel(a.classes, a.height, a.width, a.channels, a.noise_sigma,
                             a.mode.c_str(), a.strength, a.train_n, a.test_n, a.seed,
                             train.out(), test.out()));
        check(sg_dataset_write_raw(train.get(), a.out_train.c_str()));
        check(sg_dataset_write_raw(test.get(), a.out_test.c_str()));
        std::printf("pixel bench: %llu train + %llu test samples -> %s, %s\n",
                    static_cast<unsigned long long>(a.train_n),
                    static_cast<unsigned long long>(a.test_n), a.out_train.c_str(),
                    a.out_test.c_str());
        return 0;
    }

    if (a.spec.empty())
        fail(kExitUsage, "synth requires --spec (generator JSON)");
    std::string spec_text = read_text_file(a.spec);

    if (!a.out.empty()) {
        // single sample set straight from the spec
        FeaturesHandle f;
        check(sg_synth_features(spec_text.c_str(), f.out()));
        check(sg_features_save(f.get(), a.out.c_str(), 1));
        uint64_t n = 0, d = 0;
        check(sg_features_dims(f.get(), &n, &d));
        std::printf("synthesized %llu x %llu feature matrix -> %s\n",
                    static_cast<unsigned long long>(n), static_cast<unsigned long long>(d),
                    a.out.c_str());
        return 0;
    }

    if (a.out_train.empty() || a.out_test.empty())
        fail(kExitUsage, "synth requires --out (single set) or --out-train/--out-test");
    if (a.train_n == 0 || a.test_n == 0)
        fail(kExitUsage, "synth split mode requires --train-n and --test-n");
    FeaturesHandle train, test;
    OwnedLabels train_labels, test_labels;
    check(sg_synth_mismatch(spec_text.c_str(), a.mode.c_str(), a.strength, a.train_n,
                            a.test_n, a.seed, train.out(), test.out(), train_labels.out(),
                            test_labels.out()));
    check(sg_features_save(train.get(), a.out_train.c_str(), 1));
    check(sg_features_save(test.get(), a.out_test.c_str(), 1));
    if (!a.out_train_labels.empty())
        write_labels_csv(a.out_train_labels, train_labels.p, a.train_n);
    if (!a.out_test_labels.empty())
        write_labels_csv(a.out_test_labels, test_labels.p, a.test_n);
    std::printf("synthesized %s splits: %llu train + %llu test -> %s, %s\n", a.mode.c_str(),
                static_cast<unsigned long long>(a.train_n),
                static_cast<unsigned long long>(a.test_n), a.out_train.c_str(),
                a.out_test.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"splitgauge - split-integrity auditing for benchmark datasets"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sg_version()));

    EmbedArgs embed_args;
    CLI::App* embed = app.add_subcommand("embed", "Embed a dataset with the reference embedder");
    embed->add_option("--data", embed_args.data, "Input dataset (SGTD raw or MATLAB container)");
    embed->add_option("--out", embed_args.out, "Output FEATMTX1 file");
    embed->add_option("--out-labels", embed_args.out_labels, "Also write labels as CSV");
    embed->add_option("--pool-h", embed_args.pool_h, "Pooling grid height");
    embed->add_option("--pool-w", embed_args.pool_w, "Pooling grid width");
    embed->add_option("--proj-dim", embed_args.proj_dim, "Projection dimension");
    embed->add_option("--seed", embed_args.seed, "Projection seed");
    embed->add_option("--dtype", embed_args.dtype, "Payload dtype: f32 or f64");
    embed->add_flag("--remap-label-ten", embed_args.remap_label_ten,
                    "Map label 10 to class 0 when reading MATLAB containers");
    embed->add_option("--threads", embed_args.threads, "Worker threads");
    embed->add_option("--config", embed_args.config_path, "JSON config file");

    AuditArgs audit_args;
    CLI::App* audit = app.add_subcommand("audit", "Run the subset-FID split audit");
    audit->add_option("--train-features", audit_args.train_features, "Train FEATMTX1 file");
    audit->add_option("--test-features", audit_args.test_features, "Test FEATMTX1 file");
    audit->add_option("--train", audit_args.train, "Train dataset (embedded on the fly)");
    audit->add_option("--test", audit_args.test, "Test dataset (embedded on the fly)");
    audit->add_option("--m", audit_args.m, "Subset size per draw");
    audit->add_option("--seeds", audit_args.seeds, "Comma-separated seed list");
    audit->add_option("--tau", audit_args.tau, "Mismatch gap-ratio threshold");
    audit->add_option("--tau-low", audit_args.tau_low, "Match gap-ratio threshold");
    audit->add_option("--z-min", audit_args.z_min, "Mismatch z-score threshold");
    audit->add_option("--jitter", audit_args.jitter, "Add eps*I to covariances");
    audit->add_option("--pool-h", audit_args.pool_h, "Embedder pooling grid height");
    audit->add_option("--pool-w", audit_args.pool_w, "Embedder pooling grid width");
    audit->add_option("--proj-dim", audit_args.proj_dim, "Embedder projection dimension");
    audit->add_option("--embed-seed", audit_args.embed_seed, "Embedder seed");
    audit->add_flag("--remap-label-ten", audit_args.remap_label_ten,
                    "Map label 10 to class 0 when reading MATLAB containers");
    audit->add_option("--out", audit_args.out, "Report envelope JSON path");
    audit->add_option("--csv", audit_args.csv, "Per-seed rows CSV path");
    audit->add_option("--svg", audit_args.svg, "Grouped-bar chart SVG path");
    audit->add_flag("--fail-on-mismatch", audit_args.fail_on_mismatch,
                    "Exit with code 4 when the verdict is mismatch");
    audit->add_option("--threads", audit_args.threads, "Worker threads");
    audit->add_option("--config", audit_args.config_path, "JSON config file");

    IsArgs is_args;
    CLI::App* is_cmd = app.add_subcommand("is", "Inception Score from a probability matrix");
    is_cmd->add_option("--probs", is_args.probs, "CSV or PROBMTX1 file");
    is_cmd->add_option("--folds", is_args.folds, "Also report per-fold scores");
    is_cmd->add_option("--out", is_args.out, "Report envelope JSON path");
    is_cmd->add_option("--config", is_args.config_path, "JSON config file");

    RemixArgs remix_args;
    CLI::App* remix = app.add_subcommand("remix", "Build (and optionally apply) a stratified remix plan");
    remix->add_option("--train", remix_args.train, "Train dataset");
    remix->add_option("--test", remix_args.test, "Test dataset");
    remix->add_option("--train-labels", remix_args.train_labels, "Train labels CSV");
    remix->add_option("--test-labels", remix_args.test_labels, "Test labels CSV");
    remix->add_option("--train-features", remix_args.train_features, "Train FEATMTX1 (for --emit-*-features)");
    remix->add_option("--test-features", remix_args.test_features, "Test FEATMTX1 (for --emit-*-features)");
    remix->add_option("--classes", remix_args.classes, "Class count override");
    remix->add_option("--seed", remix_args.seed, "Shuffle seed");
    remix->add_option("--out", remix_args.out, "Plan JSON path");
    remix->add_option("--report", remix_args.report, "Summary envelope JSON path");
    remix->add_option("--emit-train", remix_args.emit_train, "Write remixed train dataset");
    remix->add_option("--emit-test", remix_args.emit_test, "Write remixed test dataset");
    remix->add_option("--emit-train-features", remix_args.emit_train_features,
                      "Write remixed train features");
    remix->add_option("--emit-test-features", remix_args.emit_test_features,
                      "Write remixed test features");
    remix->add_option("--emit-train-labels", remix_args.emit_train_labels,
                      "Write remixed train labels CSV");
    remix->add_option("--emit-test-labels", remix_args.emit_test_labels,
                      "Write remixed test labels CSV");
    remix->add_flag("--remap-label-ten", remix_args.remap_label_ten,
                    "Map label 10 to class 0 when reading MATLAB containers");
    remix->add_option("--config", remix_args.config_path, "JSON config file");

    FitDensityArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit-density", "Fit a Gaussian mixture density model");
    fit->add_option("--features", fit_args.features, "Training FEATMTX1 file");
    fit->add_option("--k", fit_args.k, "Mixture components");
    fit->add_option("--seed", fit_args.seed, "Initialization seed");
    fit->add_option("--tol", fit_args.tol, "Log-likelihood convergence tolerance");
    fit->add_option("--max-iter", fit_args.max_iter, "Iteration cap");
    fit->add_option("--reg", fit_args.reg, "Covariance ridge (< 0 selects the default)");
    fit->add_flag("--diagonal", fit_args.diagonal, "Diagonal covariances");
    fit->add_option("--out", fit_args.out, "Model JSON path");
    fit->add_option("--threads", fit_args.threads, "Worker threads");
    fit->add_option("--config", fit_args.config_path, "JSON config file");

    BpdArgs bpd_args;
    CLI::App* bpd_cmd = app.add_subcommand("bpd", "Bits per dimension under a fitted model");
    bpd_cmd->add_option("--model", bpd_args.model, "Model JSON path");
    bpd_cmd->add_option("--features", bpd_args.features, "Single evaluation set");
    bpd_cmd->add_option("--train-features", bpd_args.train_features, "Train evaluation set");
    bpd_cmd->add_option("--test-features", bpd_args.test_features, "Test evaluation set");
    bpd_cmd->add_option("--out", bpd_args.out, "Report envelope JSON path");
    bpd_cmd->add_option("--threads", bpd_args.threads, "Worker threads");
    bpd_cmd->add_option("--config", bpd_args.config_path, "JSON config file");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate synthetic benchmark data");
    synth->add_option("--spec", synth_args.spec, "Generator spec JSON");
    synth->add_option("--mode", synth_args.mode, "none, density_skew or subpop_drop");
    synth->add_option("--strength", synth_args.strength, "Mismatch strength in [0, 1]");
    synth->add_option("--train-n", synth_args.train_n, "Train sample count");
    synth->add_option("--test-n", synth_args.test_n, "Test sample count");
    synth->add_option("--seed", synth_args.seed, "Sampling seed");
    synth->add_option("--out", synth_args.out, "Single-set output FEATMTX1");
    synth->add_option("--out-train", synth_args.out_train, "Train output path");
    synth->add_option("--out-test", synth_args.out_test, "Test output path");
    synth->add_option("--out-train-labels", synth_args.out_train_labels, "Train labels CSV");
    synth->add_option("--out-test-labels", synth_args.out_test_labels, "Test labels CSV");
    synth->add_flag("--pixel", synth_args.pixel, "Pixel bench (emits SGTD datasets)");
    synth->add_option("--classes", synth_args.classes, "Pixel bench class count");
    synth->add_option("--height", synth_args.height, "Pixel bench image height");
    synth->add_option("--width", synth_args.width, "Pixel bench image width");
    synth->add_option("--channels", synth_args.channels, "Pixel bench channels");
    synth->add_option("--noise-sigma", synth_args.noise_sigma, "Pixel bench noise sigma");
    synth->add_option("--config", synth_args.config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)  // --help / --version
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (embed->parsed()) return run_embed(embed, embed_args);
        if (audit->parsed()) return run_audit(audit, audit_args);
        if (is_cmd->parsed()) return run_is(is_cmd, is_args);
        if (remix->parsed()) return run_remix(remix, remix_args);
        if (fit->parsed()) return run_fit_density(fit, fit_args);
        if (bpd_cmd->parsed()) return run_bpd(bpd_cmd, bpd_args);
        if (synth->parsed()) return run_synth(synth, synth_args);
    } catch (const CliError& e) {
        std::fprintf(stderr, "splitgauge: %s\n", e.message.c_str());
        return e.code;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "splitgauge: %s\n", e.what());
        return kExitData;
    }
    return 0;
}
