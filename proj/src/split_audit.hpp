#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace splitgauge {

// The three equally sized random subsets of one audit round: two disjoint
// subsets of the training split and one subset of the test split.
struct SubsetTriple {
    std::vector<uint32_t> train_prime;
    std::vector<uint32_t> train_double_prime;
    std::vector<uint32_t> test_prime;
    uint32_t m = 0;
    uint64_t seed = 0;
};

// Thresholds of the mismatch decision rule. Defaults are calibrated so that
// published SVHN statistics (ratio ~5, z ~41) flag as a mismatch while
// CIFAR-10 (ratio ~1.002) passes as a match.
struct DecisionRule {
    double tau = 1.5;      // mismatch requires gap_ratio > tau ...
    double z_min = 3.0;    // ... and z_gap > z_min
    double tau_low = 1.2;  // match requires gap_ratio < tau_low and z_gap < z_min
};

enum class Verdict { match, mismatch, inconclusive };

const char* verdict_name(Verdict v);

struct AuditConfig {
    uint32_t m = 10000;
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
    DecisionRule rule;
    double jitter = 0.0;  // eps * I added to covariances before the distance
    int threads = 1;
};

struct AuditSeedRow {
    uint64_t seed = 0;
    double fid_within = 0.0;
    double fid_cross = 0.0;
};

struct AuditReport {
    std::vector<AuditSeedRow> per_seed;
    double within_mean = 0.0;
    double within_std = 0.0;
    double cross_mean = 0.0;
    double cross_std = 0.0;
    double gap_ratio = 0.0;
    double z_gap = 0.0;
    Verdict verdict = Verdict::inconclusive;
    AuditConfig config;
    uint64_t train_n = 0;
    uint64_t test_n = 0;
    uint32_t feature_dim = 0;
    std::string embedder_id;
};

// Draws the subset triple for one seed: 2m train indices without replacement
// (first half D', second half D''), m test indices. Deterministic per
// (train_n, test_n, m, seed); independent of any other draw.
SubsetTriple sample_subsets(uint64_t train_n, uint64_t test_n, uint32_t m, uint64_t seed);

// Runs the full multi-seed protocol: per seed, FID between the two disjoint
// train subsets (within) and between a train subset and the test subset
// (cross), then aggregation and the mismatch verdict. Seeds may run in
// parallel; the report is byte-identical to serial execution.
AuditReport audit(const FeatureMatrix& train_f, const FeatureMatrix& test_f,
                  const AuditConfig& config);

// Recomputes the aggregate fields from per-seed rows; audit() uses exactly
// this, so reports can be validated against their own rows.
void aggregate_report(AuditReport& report);

}  // namespace splitgauge
