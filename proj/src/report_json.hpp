#pragma once

#include <string>
#include <vector>

#include "density_probe.hpp"
#include "remixer.hpp"
#include "score_metrics.hpp"
#include "split_audit.hpp"

namespace splitgauge {

// Deterministic payload serialization: same inputs, same bytes, regardless
// of thread count or platform. The CLI wraps these payloads in its envelope.
std::string audit_report_to_json(const AuditReport& report);
std::string is_result_to_json(const IsResult& result, const std::vector<IsResult>& folds);
std::string remix_plan_to_json(const RemixPlan& plan);
RemixPlan remix_plan_from_json(const std::string& json_text);
std::string bpd_result_to_json(const BpdResult& result);

// Published FID / IS statistics (Inception-v3 features, 10k subsets, 5
// seeds) for the stock benchmark splits; echoed in every audit report so a
// user can compare their own runs against the known baselines.
struct ReferenceStat {
    const char* dataset;
    const char* metric;  // "fid_within", "fid_cross", "is_train", "is_test"
    double mean;
    double std;
};
const std::vector<ReferenceStat>& reference_baselines();

}  // namespace splitgauge
