#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "types.hpp"

namespace splitgauge {

// Where a remixed sample comes from: the original train or test split.
enum class SourceSplit : uint8_t { train = 0, test = 1 };

struct SourceRef {
    SourceSplit split;
    uint32_t index;

    bool operator==(const SourceRef&) const = default;
};

// A partition of all original (split, index) pairs into a new train and test
// assignment that preserves split sizes and per-class counts exactly.
struct RemixPlan {
    uint64_t seed = 0;
    std::vector<SourceRef> new_train;
    std::vector<SourceRef> new_test;
};

// Pools both splits per class, shuffles each pool with a sub-stream keyed by
// (seed, class), and hands the first n_train(c) entries of each pool to the
// new train split. The final order of each output split is shuffled as well,
// so materialized datasets are not class-sorted. Deterministic per
// (labels, seed).
RemixPlan remix(const std::vector<uint32_t>& train_labels,
                const std::vector<uint32_t>& test_labels, uint32_t class_count,
                uint64_t seed);

// Materializes a plan against the original datasets. Rejects out-of-range
// indices and label drift (per-class counts no longer matching the plan).
std::pair<Dataset, Dataset> apply_plan(const RemixPlan& plan, const Dataset& train,
                                       const Dataset& test);

// Same, for feature-space splits (plan indices select rows). Labels are
// carried alongside since feature matrices do not store them.
struct RemixedFeatures {
    FeatureMatrix train;
    FeatureMatrix test;
    std::vector<uint32_t> train_labels;
    std::vector<uint32_t> test_labels;
};
RemixedFeatures apply_plan_features(const RemixPlan& plan, const FeatureMatrix& train,
                                    const FeatureMatrix& test,
                                    const std::vector<uint32_t>& train_labels,
                                    const std::vector<uint32_t>& test_labels);

}  // namespace splitgauge
