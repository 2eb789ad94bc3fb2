#include <doctest.h>

#include <cmath>

#include "embedder.hpp"
#include "error.hpp"
#include "gaussian_stats.hpp"
#include "split_audit.hpp"
#include "synth_bench.hpp"

using namespace splitgauge;

namespace {

GeneratorSpec single_gaussian(Eigen::VectorXd mean, double var, uint64_t seed, uint64_t n) {
    GeneratorSpec spec;
    GeneratorSpec::Component c;
    c.weight = 1.0;
    c.cov = var * Eigen::MatrixXd::Identity(mean.size(), mean.size());
    c.mean = std::move(mean);
    spec.components = {std::move(c)};
    spec.seed = seed;
    spec.n = n;
    return spec;
}

GeneratorSpec three_component_spec(Eigen::Index d) {
    GeneratorSpec spec;
    for (int c = 0; c < 3; ++c) {
        GeneratorSpec::Component comp;
        comp.weight = 1.0 / 3;
        comp.mean = Eigen::VectorXd::Zero(d);
        comp.mean(2 * c) = 2.5;
        comp.mean(2 * c + 1) = c % 2 ? -2.0 : 1.5;
        comp.cov = Eigen::MatrixXd::Identity(d, d);
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

}  // namespace

TEST_CASE("sample mean concentrates around the generator mean") {
    Eigen::VectorXd mu(2);
    mu << 1.5, -2.0;
    GeneratorSpec spec = single_gaussian(mu, 1.0, 3, 10000);
    FeatureMatrix f = gen_features(spec);
    Eigen::VectorXd sample_mean = f.values.colwise().mean();
    double bound = 5.0 * std::sqrt(1.0 / 10000.0);
    for (int i = 0; i < 2; ++i)
        CHECK(std::abs(sample_mean(i) - mu(i)) < bound);
}

TEST_CASE("empirical frechet matches the analytic commuting closed form") {
    // N(0, I) vs N(3 e1, 4 I) in d = 2: analytic value 9 + 2 = 11
    Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(2);
    mu2(0) = 3.0;
    double analytic = analytic_frechet_diag(mu1, Eigen::VectorXd::Ones(2), mu2,
                                            Eigen::VectorXd::Constant(2, 4.0));
    CHECK(analytic == doctest::Approx(11.0));

    FeatureMatrix a = gen_features(single_gaussian(mu1, 1.0, 5, 50000));
    FeatureMatrix b = gen_features(single_gaussian(mu2, 4.0, 6, 50000));
    double empirical = frechet(summarize(a), summarize(b));
    CHECK(std::abs(empirical - analytic) / analytic < 0.05);
}

TEST_CASE("same spec and seed give identical matrices") {
    GeneratorSpec spec = three_component_spec(6);
    spec.seed = 9;
    spec.n = 500;
    FeatureMatrix a = gen_features(spec);
    FeatureMatrix b = gen_features(spec);
    CHECK(a.values == b.values);
}

TEST_CASE("non-PSD covariance is rejected") {
    GeneratorSpec spec;
    GeneratorSpec::Component c;
    c.weight = 1.0;
    c.mean = Eigen::VectorXd::Zero(2);
    c.cov = Eigen::MatrixXd::Zero(2, 2);
    c.cov(0, 0) = 1.0;
    c.cov(1, 1) = -1.0;
    spec.components = {c};
    spec.n = 10;
    CHECK_THROWS_AS(gen_features(spec), Error);
}

TEST_CASE("weights must sum to one") {
    GeneratorSpec spec;
    GeneratorSpec::Component c;
    c.weight = 0.7;
    c.mean = Eigen::VectorXd::Zero(1);
    c.cov = Eigen::MatrixXd::Identity(1, 1);
    spec.components = {c};
    spec.n = 10;
    CHECK_THROWS_AS(gen_features(spec), Error);
}

TEST_CASE("empirical fid between same-generator samples decreases with n") {
    GeneratorSpec spec = three_component_spec(6);
    double previous = 1e300;
    for (uint64_t n : {500, 2000, 8000}) {
        GeneratorSpec sa = spec, sb = spec;
        sa.seed = 100;
        sb.seed = 200;
        sa.n = sb.n = n;
        double fid = frechet(summarize(gen_features(sa)), summarize(gen_features(sb)));
        CHECK(fid < previous);
        previous = fid;
    }
    CHECK(previous < 0.1);
}

TEST_CASE("mismatch splits keep label marginals under density_skew") {
    GeneratorSpec spec = three_component_spec(6);
    MismatchSplits s = inject_mismatch(spec, MismatchMode::density_skew, 0.8, 9000, 9000, 3);
    std::vector<double> train_freq(3, 0.0), test_freq(3, 0.0);
    for (uint32_t l : s.train_labels)
        train_freq[l] += 1.0 / 9000;
    for (uint32_t l : s.test_labels)
        test_freq[l] += 1.0 / 9000;
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(train_freq[c] - test_freq[c]) < 0.03);
}

TEST_CASE("subpop_drop skews label marginals instead") {
    GeneratorSpec spec = three_component_spec(6);
    MismatchSplits s = inject_mismatch(spec, MismatchMode::subpop_drop, 1.0, 2000, 2000, 4);
    // full drop leaves a single surviving component in test
    std::vector<int> seen(3, 0);
    for (uint32_t l : s.test_labels)
        ++seen[l];
    int nonzero = 0;
    for (int c : seen)
        nonzero += c > 0;
    CHECK(nonzero == 1);
}

TEST_CASE("strength zero behaves like mode none (verdict agreement over seeds)") {
    GeneratorSpec spec = three_component_spec(6);
    int agreements = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        MismatchSplits none = inject_mismatch(spec, MismatchMode::none, 0.0, 2400, 1200, seed);
        MismatchSplits zero =
            inject_mismatch(spec, MismatchMode::density_skew, 0.0, 2400, 1200, seed);
        AuditConfig cfg;
        cfg.m = 600;
        // null-data verdicts flutter between match and inconclusive; the
        // degeneracy claim is that neither mode flags a mismatch
        Verdict va = audit(none.train, none.test, cfg).verdict;
        Verdict vb = audit(zero.train, zero.test, cfg).verdict;
        agreements += (va == Verdict::mismatch) == (vb == Verdict::mismatch);
    }
    CHECK(agreements >= 19);
}

TEST_CASE("invalid strength and unknown modes are rejected") {
    GeneratorSpec spec = three_component_spec(6);
    CHECK_THROWS_AS(inject_mismatch(spec, MismatchMode::density_skew, 1.5, 10, 10, 0),
                    Error);
    CHECK_THROWS_AS(mismatch_mode_from_name("bogus"), Error);
    CHECK(mismatch_mode_from_name("density_skew") == MismatchMode::density_skew);
}

TEST_CASE("generator spec json: scalar, diagonal and full covariances") {
    GeneratorSpec spec = generator_spec_from_json(R"({
        "seed": 4, "n": 50,
        "components": [
            {"weight": 0.5, "mean": [0, 0], "cov": 2.0},
            {"weight": 0.25, "mean": [1, 1], "cov": [1.0, 3.0]},
            {"weight": 0.25, "mean": [2, 2], "cov": [[1.0, 0.2], [0.2, 1.0]]}
        ]})");
    CHECK(spec.components.size() == 3);
    CHECK(spec.components[0].cov(1, 1) == 2.0);
    CHECK(spec.components[1].cov(1, 1) == 3.0);
    CHECK(spec.components[1].cov(0, 1) == 0.0);
    CHECK(spec.components[2].cov(0, 1) == 0.2);
    CHECK_NOTHROW(gen_features(spec));

    CHECK_THROWS_AS(generator_spec_from_json("{\"components\": []}"), Error);
    CHECK_THROWS_AS(generator_spec_from_json("not json"), Error);
}

TEST_CASE("pixel bench: embedder separates skewed from clean splits") {
    PixelBenchSpec spec;
    spec.class_count = 3;
    spec.height = 12;
    spec.width = 12;
    spec.channels = 3;
    spec.noise_sigma = 48.0;

    PixelSplits skewed = gen_pixel_mismatch(spec, MismatchMode::density_skew, 0.8, 3000,
                                            2000, 1);
    PixelSplits clean = gen_pixel_mismatch(spec, MismatchMode::none, 0.0, 3000, 2000, 1);

    EmbedderConfig ecfg;
    AuditConfig cfg;
    cfg.m = 1000;
    AuditReport skew_report = audit(embed_reference(skewed.train, ecfg),
                                    embed_reference(skewed.test, ecfg), cfg);
    AuditReport clean_report = audit(embed_reference(clean.train, ecfg),
                                     embed_reference(clean.test, ecfg), cfg);
    CHECK(skew_report.gap_ratio > clean_report.gap_ratio);
    CHECK(clean_report.verdict != Verdict::mismatch);
}

TEST_CASE("pixel bench is deterministic and in range") {
    PixelBenchSpec spec;
    PixelSplits a = gen_pixel_mismatch(spec, MismatchMode::none, 0.0, 50, 20, 3);
    PixelSplits b = gen_pixel_mismatch(spec, MismatchMode::none, 0.0, 50, 20, 3);
    CHECK(a.train.pixels == b.train.pixels);
    CHECK(a.test.labels == b.test.labels);
    CHECK(a.train.size() == 50);
    a.train.validate();
}
