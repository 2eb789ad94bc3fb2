#include "report_json.hpp"

#include <json.hpp>

#include <cmath>

#include "error.hpp"

namespace splitgauge {

const std::vector<ReferenceStat>& reference_baselines() {
    static const std::vector<ReferenceStat> table = {
        {"svhn", "fid_within", 3.309, 0.029},
        {"svhn", "fid_cross", 16.687, 0.325},
        {"svhn", "is_train", 8.507, 0.114},
        {"svhn", "is_test", 8.142, 0.501},
        {"svhn-remix", "fid_within", 3.334, 0.018},
        {"svhn-remix", "fid_cross", 3.326, 0.015},
        {"svhn-remix", "is_train", 8.348, 0.568},
        {"svhn-remix", "is_test", 8.269, 0.549},
        {"cifar10", "fid_within", 5.196, 0.040},
        {"cifar10", "fid_cross", 5.206, 0.031},
        {"cifar10", "is_train", 7.700, 0.043},
        {"cifar10", "is_test", 7.692, 0.023},
    };
    return table;
}

namespace {

nlohmann::json baselines_json() {
    nlohmann::json out;
    for (const ReferenceStat& s : reference_baselines()) {
        out[s.dataset][s.metric] = {{"mean", s.mean}, {"std", s.std}};
    }
    return out;
}

}  // namespace

std::string audit_report_to_json(const AuditReport& report) {
    nlohmann::json j;
    j["per_seed"] = nlohmann::json::array();
    for (const AuditSeedRow& row : report.per_seed)
        j["per_seed"].push_back({{"seed", row.seed},
                                 {"fid_within", row.fid_within},
                                 {"fid_cross", row.fid_cross}});
    j["within_mean"] = report.within_mean;
    j["within_std"] = report.within_std;
    j["cross_mean"] = report.cross_mean;
    j["cross_std"] = report.cross_std;
    j["gap_ratio"] = report.gap_ratio;
    j["z_gap"] = report.z_gap;
    j["verdict"] = verdict_name(report.verdict);
    j["config"] = {{"m", report.config.m},
                   {"seeds", report.config.seeds},
                   {"tau", report.config.rule.tau},
                   {"tau_low", report.config.rule.tau_low},
                   {"z_min", report.config.rule.z_min},
                   {"jitter", report.config.jitter}};
    j["train_n"] = report.train_n;
    j["test_n"] = report.test_n;
    j["feature_dim"] = report.feature_dim;
    j["embedder_id"] = report.embedder_id;
    j["reference_baselines"] = baselines_json();
    return j.dump(2);
}

std::string is_result_to_json(const IsResult& result, const std::vector<IsResult>& folds) {
    nlohmann::json j;
    j["score"] = result.score;
    j["mean_kl"] = result.mean_kl;
    j["marginal"] = std::vector<double>(result.marginal.data(),
                                        result.marginal.data() + result.marginal.size());
    if (!folds.empty()) {
        nlohmann::json f = nlohmann::json::array();
        double mean = 0.0;
        for (const IsResult& r : folds) {
            f.push_back(r.score);
            mean += r.score;
        }
        mean /= static_cast<double>(folds.size());
        double var = 0.0;
        for (const IsResult& r : folds)
            var += (r.score - mean) * (r.score - mean);
        j["folds"] = {{"scores", std::move(f)},
                      {"mean", mean},
                      {"std", folds.size() > 1
                                  ? std::sqrt(var / static_cast<double>(folds.size() - 1))
                                  : 0.0}};
    }
    return j.dump(2);
}

std::string remix_plan_to_json(const RemixPlan& plan) {
    nlohmann::json j;
    j["seed"] = plan.seed;
    auto refs = [](const std::vector<SourceRef>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (const SourceRef& r : v)
            arr.push_back({static_cast<int>(r.split), r.index});
        return arr;
    };
    j["new_train"] = refs(plan.new_train);
    j["new_test"] = refs(plan.new_test);
    return j.dump();  // compact: plans for real datasets run to megabytes
}

RemixPlan remix_plan_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::format, std::string("remix plan: invalid JSON: ") + e.what());
    }
    try {
        RemixPlan plan;
        plan.seed = j.value("seed", uint64_t{0});
        auto parse_refs = [](const nlohmann::json& arr, std::vector<SourceRef>& out) {
            for (const nlohmann::json& e : arr) {
                if (!e.is_array() || e.size() != 2)
                    raise(ErrorKind::format, "remix plan: entries must be [split, index]");
                int split = e[0].get<int>();
                if (split != 0 && split != 1)
                    raise(ErrorKind::validation, "remix plan: split must be 0 or 1");
                out.push_back({static_cast<SourceSplit>(split), e[1].get<uint32_t>()});
            }
        };
        parse_refs(j.at("new_train"), plan.new_train);
        parse_refs(j.at("new_test"), plan.new_test);
        return plan;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::format, std::string("remix plan: malformed JSON: ") + e.what());
    }
}

std::string bpd_result_to_json(const BpdResult& result) {
    nlohmann::json j;
    j["bpd"] = result.bpd;
    j["mean_nll_nats"] = result.mean_nll_nats;
    j["n"] = result.n;
    j["d"] = result.d;
    return j.dump(2);
}

}  // namespace splitgauge
