#include "split_audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "error.hpp"
#include "gaussian_stats.hpp"
#include "prng.hpp"

namespace splitgauge {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::match: return "match";
        case Verdict::mismatch: return "mismatch";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SubsetTriple sample_subsets(uint64_t train_n, uint64_t test_n, uint32_t m, uint64_t seed) {
    if (m == 0)
        raise(ErrorKind::validation, "sample_subsets: m must be positive");
    if (2ull * m > train_n)
        raise(ErrorKind::capacity,
              "sample_subsets: train split has " + std::to_string(train_n) +
                  " samples, need 2*m = " + std::to_string(2ull * m) +
                  " for two disjoint subsets");
    if (m > test_n)
        raise(ErrorKind::capacity, "sample_subsets: test split has " +
                                       std::to_string(test_n) + " samples, need m = " +
                                       std::to_string(m));

    SubsetTriple t;
    t.m = m;
    t.seed = seed;

    prng::Stream train_stream(seed, "subset-train");
    std::vector<uint32_t> both = prng::sample_without_replacement(train_stream, train_n, 2ull * m);
    t.train_prime.assign(both.begin(), both.begin() + m);
    t.train_double_prime.assign(both.begin() + m, both.end());

    prng::Stream test_stream(seed, "subset-test");
    t.test_prime = prng::sample_without_replacement(test_stream, test_n, m);
    return t;
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& values,
                            const std::vector<uint32_t>& indices) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), values.cols());
    for (size_t i = 0; i < indices.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = values.row(indices[i]);
    return out;
}

AuditSeedRow run_seed(const FeatureMatrix& train_f, const FeatureMatrix& test_f,
                      const AuditConfig& config, uint64_t seed) {
    SubsetTriple t = sample_subsets(static_cast<uint64_t>(train_f.rows()),
                                    static_cast<uint64_t>(test_f.rows()), config.m, seed);
    FeatureMatrix train_prime{gather_rows(train_f.values, t.train_prime), train_f.embedder_id,
                              train_f.seed};
    FeatureMatrix train_dprime{gather_rows(train_f.values, t.train_double_prime),
                               train_f.embedder_id, train_f.seed};
    FeatureMatrix test_prime{gather_rows(test_f.values, t.test_prime), test_f.embedder_id,
                             test_f.seed};

    GaussianSummary g_dprime = summarize(train_dprime);
    GaussianSummary g_prime = summarize(train_prime);
    GaussianSummary g_test = summarize(test_prime);
    if (config.jitter > 0.0) {
        g_dprime = jittered(g_dprime, config.jitter);
        g_prime = jittered(g_prime, config.jitter);
        g_test = jittered(g_test, config.jitter);
    }

    AuditSeedRow row;
    row.seed = seed;
    row.fid_within = frechet(g_dprime, g_prime);
    row.fid_cross = frechet(g_dprime, g_test);
    return row;
}

double mean_of(const std::vector<AuditSeedRow>& rows, double AuditSeedRow::*field) {
    double sum = 0.0;
    for (const AuditSeedRow& r : rows)
        sum += r.*field;
    return sum / static_cast<double>(rows.size());
}

double std_of(const std::vector<AuditSeedRow>& rows, double AuditSeedRow::*field,
              double mean) {
    double acc = 0.0;
    for (const AuditSeedRow& r : rows)
        acc += (r.*field - mean) * (r.*field - mean);
    return std::sqrt(acc / static_cast<double>(rows.size() - 1));
}

}  // namespace

void aggregate_report(AuditReport& report) {
    const std::vector<AuditSeedRow>& rows = report.per_seed;
    report.within_mean = mean_of(rows, &AuditSeedRow::fid_within);
    report.cross_mean = mean_of(rows, &AuditSeedRow::fid_cross);
    report.within_std = std_of(rows, &AuditSeedRow::fid_within, report.within_mean);
    report.cross_std = std_of(rows, &AuditSeedRow::fid_cross, report.cross_mean);

    // Guard the degenerate zero cases with a tiny floor so the report stays
    // finite and serializable.
    constexpr double kFloor = 1e-300;
    report.gap_ratio = report.cross_mean / std::max(report.within_mean, kFloor);
    double denom = std::sqrt(report.within_std * report.within_std +
                             report.cross_std * report.cross_std);
    report.z_gap = (report.cross_mean - report.within_mean) / std::max(denom, kFloor);

    const DecisionRule& rule = report.config.rule;
    if (report.gap_ratio > rule.tau && report.z_gap > rule.z_min)
        report.verdict = Verdict::mismatch;
    else if (report.gap_ratio < rule.tau_low && report.z_gap < rule.z_min)
        report.verdict = Verdict::match;
    else
        report.verdict = Verdict::inconclusive;
}

AuditReport audit(const FeatureMatrix& train_f, const FeatureMatrix& test_f,
                  const AuditConfig& config) {
    if (train_f.dim() != test_f.dim())
        raise(ErrorKind::validation,
              "audit: feature dimension mismatch (" + std::to_string(train_f.dim()) +
                  " vs " + std::to_string(test_f.dim()) + ")");
    if (config.seeds.size() < 2)
        raise(ErrorKind::validation, "audit: need at least 2 seeds for std computation");
    std::set<uint64_t> unique(config.seeds.begin(), config.seeds.end());
    if (unique.size() != config.seeds.size())
        raise(ErrorKind::validation, "audit: duplicate seeds in seed list");

    AuditReport report;
    report.config = config;
    report.train_n = static_cast<uint64_t>(train_f.rows());
    report.test_n = static_cast<uint64_t>(test_f.rows());
    report.feature_dim = static_cast<uint32_t>(train_f.dim());
    report.embedder_id = train_f.embedder_id;
    report.per_seed.resize(config.seeds.size());

    int workers = std::max(1, config.threads);
    workers = static_cast<int>(std::min<size_t>(workers, config.seeds.size()));
    if (workers == 1) {
        for (size_t i = 0; i < config.seeds.size(); ++i)
            report.per_seed[i] = run_seed(train_f, test_f, config, config.seeds[i]);
    } else {
        // Each seed writes its own slot; aggregation below runs in seed-list
        // order, so the result matches serial execution exactly.
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                try {
                    size_t i;
                    while ((i = next.fetch_add(1)) < config.seeds.size())
                        report.per_seed[i] = run_seed(train_f, test_f, config, config.seeds[i]);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (std::thread& th : pool)
            th.join();
        for (std::exception_ptr& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    aggregate_report(report);
    return report;
}

}  // namespace splitgauge
