#include "remixer.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"
#include "prng.hpp"

namespace splitgauge {

namespace {

void check_labels(const std::vector<uint32_t>& labels, uint32_t class_count,
                  const char* which) {
    for (uint32_t label : labels)
        if (label >= class_count)
            raise(ErrorKind::validation,
                  std::string("remix: ") + which + " label " + std::to_string(label) +
                      " out of range [0, " + std::to_string(class_count) + ")");
}

std::vector<uint32_t> class_counts(const std::vector<uint32_t>& labels,
                                   uint32_t class_count) {
    std::vector<uint32_t> counts(class_count, 0);
    for (uint32_t label : labels)
        ++counts[label];
    return counts;
}

}  // namespace

RemixPlan remix(const std::vector<uint32_t>& train_labels,
                const std::vector<uint32_t>& test_labels, uint32_t class_count,
                uint64_t seed) {
    if (class_count == 0)
        raise(ErrorKind::validation, "remix: class_count must be positive");
    check_labels(train_labels, class_count, "train");
    check_labels(test_labels, class_count, "test");

    // Per-class pools in canonical order: train pairs by index, then test
    // pairs by index. Determinism is over this logical content.
    std::vector<std::vector<SourceRef>> pools(class_count);
    for (uint32_t i = 0; i < train_labels.size(); ++i)
        pools[train_labels[i]].push_back({SourceSplit::train, i});
    for (uint32_t i = 0; i < test_labels.size(); ++i)
        pools[test_labels[i]].push_back({SourceSplit::test, i});

    std::vector<uint32_t> train_counts = class_counts(train_labels, class_count);

    RemixPlan plan;
    plan.seed = seed;
    plan.new_train.reserve(train_labels.size());
    plan.new_test.reserve(test_labels.size());
    for (uint32_t c = 0; c < class_count; ++c) {
        prng::Stream stream(seed, "remix-class-" + std::to_string(c));
        prng::shuffle(stream, pools[c]);
        uint32_t take = train_counts[c];
        plan.new_train.insert(plan.new_train.end(), pools[c].begin(), pools[c].begin() + take);
        plan.new_test.insert(plan.new_test.end(), pools[c].begin() + take, pools[c].end());
    }

    // The per-class pass above leaves both outputs class-sorted; shuffle the
    // final order so materialized splits look like the published remix.
    prng::Stream train_order(seed, "remix-order-train");
    prng::shuffle(train_order, plan.new_train);
    prng::Stream test_order(seed, "remix-order-test");
    prng::shuffle(test_order, plan.new_test);
    return plan;
}

namespace {

Dataset materialize(const std::vector<SourceRef>& refs, const Dataset& train,
                    const Dataset& test) {
    Dataset out;
    out.height = train.height;
    out.width = train.width;
    out.channels = train.channels;
    out.class_count = std::max(train.class_count, test.class_count);
    out.pixels.reserve(refs.size() * train.sample_bytes());
    out.labels.reserve(refs.size());
    for (const SourceRef& ref : refs) {
        const Dataset& src = ref.split == SourceSplit::train ? train : test;
        if (ref.index >= src.size())
            raise(ErrorKind::validation,
                  "apply_plan: index " + std::to_string(ref.index) + " out of range for " +
                      (ref.split == SourceSplit::train ? "train" : "test") + " split of size " +
                      std::to_string(src.size()));
        const uint8_t* px = src.sample(ref.index);
        out.pixels.insert(out.pixels.end(), px, px + src.sample_bytes());
        out.labels.push_back(src.labels[ref.index]);
    }
    return out;
}

void check_partition(const RemixPlan& plan, size_t train_n, size_t test_n) {
    if (plan.new_train.size() != train_n)
        raise(ErrorKind::validation,
              "apply_plan: plan train size " + std::to_string(plan.new_train.size()) +
                  " does not match dataset train size " + std::to_string(train_n));
    if (plan.new_test.size() != test_n)
        raise(ErrorKind::validation,
              "apply_plan: plan test size " + std::to_string(plan.new_test.size()) +
                  " does not match dataset test size " + std::to_string(test_n));
    std::vector<bool> seen_train(train_n, false), seen_test(test_n, false);
    auto mark = [&](const SourceRef& ref) {
        std::vector<bool>& seen = ref.split == SourceSplit::train ? seen_train : seen_test;
        size_t limit = ref.split == SourceSplit::train ? train_n : test_n;
        if (ref.index >= limit)
            raise(ErrorKind::validation,
                  "apply_plan: index " + std::to_string(ref.index) + " out of range");
        if (seen[ref.index])
            raise(ErrorKind::validation,
                  "apply_plan: duplicate reference to index " + std::to_string(ref.index));
        seen[ref.index] = true;
    };
    for (const SourceRef& ref : plan.new_train)
        mark(ref);
    for (const SourceRef& ref : plan.new_test)
        mark(ref);
}

// The plan was built to reproduce the original per-class counts; if the
// materialized counts differ, the datasets changed since planning.
void check_label_drift(const std::vector<uint32_t>& materialized_train_labels,
                       const Dataset& train, uint32_t class_count) {
    std::vector<uint32_t> expect = class_counts(train.labels, class_count);
    std::vector<uint32_t> got = class_counts(materialized_train_labels, class_count);
    if (expect != got)
        raise(ErrorKind::validation,
              "apply_plan: per-class counts of the materialized train split do not match "
              "the original; labels drifted since the plan was created");
}

}  // namespace

std::pair<Dataset, Dataset> apply_plan(const RemixPlan& plan, const Dataset& train,
                                       const Dataset& test) {
    train.validate();
    test.validate();
    if (train.height != test.height || train.width != test.width ||
        train.channels != test.channels)
        raise(ErrorKind::validation, "apply_plan: train and test image shapes differ");
    check_partition(plan, train.size(), test.size());

    Dataset new_train = materialize(plan.new_train, train, test);
    Dataset new_test = materialize(plan.new_test, train, test);
    check_label_drift(new_train.labels, train,
                      std::max(train.class_count, test.class_count));
    return {std::move(new_train), std::move(new_test)};
}

RemixedFeatures apply_plan_features(const RemixPlan& plan, const FeatureMatrix& train,
                                    const FeatureMatrix& test,
                                    const std::vector<uint32_t>& train_labels,
                                    const std::vector<uint32_t>& test_labels) {
    if (static_cast<size_t>(train.rows()) != train_labels.size() ||
        static_cast<size_t>(test.rows()) != test_labels.size())
        raise(ErrorKind::validation, "apply_plan: label count does not match feature rows");
    if (train.dim() != test.dim())
        raise(ErrorKind::validation, "apply_plan: feature dimension mismatch");
    check_partition(plan, train_labels.size(), test_labels.size());

    RemixedFeatures out;
    auto gather = [&](const std::vector<SourceRef>& refs, FeatureMatrix& fm,
                      std::vector<uint32_t>& labels) {
        fm.values.resize(static_cast<Eigen::Index>(refs.size()), train.dim());
        fm.embedder_id = train.embedder_id;
        fm.seed = train.seed;
        labels.reserve(refs.size());
        for (size_t i = 0; i < refs.size(); ++i) {
            const SourceRef& ref = refs[i];
            const FeatureMatrix& src = ref.split == SourceSplit::train ? train : test;
            const std::vector<uint32_t>& src_labels =
                ref.split == SourceSplit::train ? train_labels : test_labels;
            fm.values.row(static_cast<Eigen::Index>(i)) = src.values.row(ref.index);
            labels.push_back(src_labels[ref.index]);
        }
    };
    gather(plan.new_train, out.train, out.train_labels);
    gather(plan.new_test, out.test, out.test_labels);

    // Same drift rule as the dataset path.
    uint32_t class_count = 0;
    for (uint32_t l : train_labels) class_count = std::max(class_count, l + 1);
    for (uint32_t l : test_labels) class_count = std::max(class_count, l + 1);
    if (class_count > 0) {
        std::vector<uint32_t> expect(class_count, 0), got(class_count, 0);
        for (uint32_t l : train_labels) ++expect[l];
        for (uint32_t l : out.train_labels) ++got[l];
        if (expect != got)
            raise(ErrorKind::validation,
                  "apply_plan: per-class counts drifted from the plan");
    }
    return out;
}

}  // namespace splitgauge
