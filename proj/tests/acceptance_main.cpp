// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// usage: acceptance_tests <path-to-splitgauge-cli>

#include <json.hpp>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "density_probe.hpp"
#include "embedder.hpp"
#include "error.hpp"
#include "gaussian_stats.hpp"
#include "prng.hpp"
#include "remixer.hpp"
#include "score_metrics.hpp"
#include "split_audit.hpp"
#include "support/mat_fixture.hpp"
#include "support/tmpdir.hpp"
#include "synth_bench.hpp"
#include "tensor_io.hpp"

using namespace splitgauge;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

std::string g_cli_path;
int g_failures = 0;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %2d. %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++g_failures;
}

Eigen::MatrixXd random_gauss_matrix(Eigen::Index r, Eigen::Index c, prng::Stream& s) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = s.next_gauss();
    return m;
}

GaussianSummary random_summary(Eigen::Index d, prng::Stream& s) {
    GaussianSummary g;
    g.mean = random_gauss_matrix(d, 1, s);
    Eigen::MatrixXd a = random_gauss_matrix(d, d, s);
    g.cov = a.transpose() * a;
    g.sample_count = 100;
    return g;
}

// The frozen synthetic generator used by criteria 5, 6 and 8: three unit
// Gaussians in d = 16 with moderately separated means.
GeneratorSpec bench_spec() {
    GeneratorSpec spec;
    for (int c = 0; c < 3; ++c) {
        GeneratorSpec::Component comp;
        comp.weight = 1.0 / 3;
        comp.mean = Eigen::VectorXd::Zero(16);
        comp.mean(2 * c) = 2.5;
        comp.mean(2 * c + 1) = c % 2 ? -2.0 : 1.5;
        comp.cov = Eigen::MatrixXd::Identity(16, 16);
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

AuditConfig bench_audit_config() {
    AuditConfig cfg;
    cfg.m = 2000;
    cfg.seeds = {1, 2, 3, 4, 5};
    return cfg;
}

int run_cli(const std::string& args) {
    std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string payload_of(const std::string& envelope_path) {
    return json::parse(slurp(envelope_path)).at("payload").dump();
}

// ---------------------------------------------------------------------------

bool crit1_frechet_closed_forms(std::string& detail) {
    auto start = clock_type::now();
    prng::Stream s(101, "crit1");
    int cases = 0;
    double worst = 0.0;
    while (cases < 100) {
        Eigen::Index d = 1 + static_cast<Eigen::Index>(s.next_below(8));
        Eigen::VectorXd m1(d), m2(d), v1(d), v2(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            m1(i) = 3.0 * s.next_gauss();
            m2(i) = 3.0 * s.next_gauss();
            v1(i) = 0.1 + 4.0 * s.next_unit();
            v2(i) = 0.1 + 4.0 * s.next_unit();
        }
        GaussianSummary a{m1, Eigen::MatrixXd(v1.asDiagonal()), 10};
        GaussianSummary b{m2, Eigen::MatrixXd(v2.asDiagonal()), 10};
        double got = frechet(a, b);
        double expect = analytic_frechet_diag(m1, v1, m2, v2);
        worst = std::max(worst, std::abs(got - expect));
        ++cases;
    }
    double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << "worst |err| " << worst << ", " << elapsed << " s";
    detail = ss.str();
    return worst <= 1e-9 && elapsed < 1.0;
}

bool crit2_matrix_sqrt(std::string& detail) {
    prng::Stream s(202, "crit2");
    double worst = 0.0;
    double elapsed512 = 0.0;
    for (Eigen::Index d : {2, 16, 128, 512}) {
        auto start = clock_type::now();
        for (int i = 0; i < 50; ++i) {
            Eigen::MatrixXd a = random_gauss_matrix(d, d, s);
            Eigen::MatrixXd S = a.transpose() * a;
            Eigen::MatrixXd r = sqrt_psd(S);
            double resid = (r * r - S).norm() / std::max(1.0, S.norm());
            worst = std::max(worst, resid);
        }
        if (d == 512)
            elapsed512 = seconds_since(start);
    }
    std::ostringstream ss;
    ss << "worst rel resid " << worst << ", d=512 bucket " << elapsed512 << " s";
    detail = ss.str();
    return worst <= 1e-8 && elapsed512 < 10.0;
}

bool crit3_fid_identities(std::string& detail) {
    prng::Stream s(303, "crit3");
    double worst_self = 0.0, worst_sym = 0.0, worst_inv = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index d = 2 + static_cast<Eigen::Index>(s.next_below(10));
        GaussianSummary a = random_summary(d, s);
        GaussianSummary b = random_summary(d, s);

        worst_self = std::max(worst_self, frechet(a, a));

        double ab = frechet(a, b), ba = frechet(b, a);
        worst_sym = std::max(worst_sym, std::abs(ab - ba) / std::max(1.0, ab));

        // common rotation + translation
        Eigen::MatrixXd q =
            Eigen::HouseholderQR<Eigen::MatrixXd>(random_gauss_matrix(d, d, s))
                .householderQ();
        Eigen::VectorXd t = random_gauss_matrix(d, 1, s);
        auto transform = [&](const GaussianSummary& g) {
            GaussianSummary out;
            out.mean = q * g.mean + t;
            out.cov = q * g.cov * q.transpose();
            out.cov = ((out.cov + out.cov.transpose()) * 0.5).eval();
            out.sample_count = g.sample_count;
            return out;
        };
        double moved = frechet(transform(a), transform(b));
        worst_inv = std::max(worst_inv, std::abs(moved - ab) / std::max(1.0, ab));
    }
    std::ostringstream ss;
    ss << "self " << worst_self << ", sym " << worst_sym << ", invariance " << worst_inv;
    detail = ss.str();
    return worst_self <= 1e-9 && worst_sym <= 1e-6 && worst_inv <= 1e-6;
}

bool crit4_is_identities(std::string& detail) {
    ProbMatrix uniform;
    uniform.rows = Eigen::MatrixXd::Constant(23, 10, 0.1);
    double uniform_err = std::abs(inception_score(uniform).score - 1.0);

    ProbMatrix onehot;
    onehot.rows = Eigen::MatrixXd::Zero(10, 10);
    for (int i = 0; i < 10; ++i)
        onehot.rows(i, i) = 1.0;
    double onehot_err = std::abs(inception_score(onehot).score - 10.0);

    ProbMatrix hand;
    hand.rows.resize(2, 2);
    hand.rows << 1.0, 0.0, 0.5, 0.5;
    double hand_err = std::abs(inception_score(hand).score - 1.24080);

    std::ostringstream ss;
    ss << "uniform err " << uniform_err << ", one-hot err " << onehot_err << ", hand err "
       << hand_err;
    detail = ss.str();
    return uniform_err <= 1e-9 && onehot_err <= 1e-6 && hand_err <= 1e-5;
}

bool crit5_mismatch_detection(std::string& detail) {
    auto start = clock_type::now();
    GeneratorSpec spec = bench_spec();
    AuditConfig cfg = bench_audit_config();

    int skew_hits = 0, none_hits = 0;
    for (uint64_t trial = 0; trial < 20; ++trial) {
        MismatchSplits skew = inject_mismatch(spec, MismatchMode::density_skew, 0.8,
                                              12000, 6000, 1000 + trial);
        AuditReport r = audit(skew.train, skew.test, cfg);
        skew_hits += r.verdict == Verdict::mismatch && r.gap_ratio > 1.5;

        MismatchSplits none =
            inject_mismatch(spec, MismatchMode::none, 0.0, 12000, 6000, 2000 + trial);
        AuditReport rn = audit(none.train, none.test, cfg);
        none_hits += rn.verdict != Verdict::mismatch;
    }

    // reference-embedder path on the pixel bench
    PixelBenchSpec pixel;
    pixel.class_count = 3;
    pixel.height = 16;
    pixel.width = 16;
    pixel.channels = 3;
    pixel.noise_sigma = 48.0;
    EmbedderConfig ecfg;
    int pixel_skew_hits = 0, pixel_none_hits = 0;
    for (uint64_t trial = 0; trial < 5; ++trial) {
        PixelSplits ps = gen_pixel_mismatch(pixel, MismatchMode::density_skew, 0.8, 8000,
                                            6000, 3000 + trial);
        AuditReport r =
            audit(embed_reference(ps.train, ecfg, 2), embed_reference(ps.test, ecfg, 2), cfg);
        pixel_skew_hits += r.verdict == Verdict::mismatch && r.gap_ratio > 1.5;

        PixelSplits pn =
            gen_pixel_mismatch(pixel, MismatchMode::none, 0.0, 8000, 6000, 4000 + trial);
        AuditReport rn =
            audit(embed_reference(pn.train, ecfg, 2), embed_reference(pn.test, ecfg, 2), cfg);
        pixel_none_hits += rn.verdict != Verdict::mismatch;
    }

    double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << "skew " << skew_hits << "/20, none " << none_hits << "/20, pixel skew "
       << pixel_skew_hits << "/5, pixel none " << pixel_none_hits << "/5, " << elapsed
       << " s";

    // optional (not CI): real Inception features for SVHN, checked against
    // the published means within 3 sigma
    const char* train_path = std::getenv("SPLITGAUGE_SVHN_TRAIN_FEATURES");
    const char* test_path = std::getenv("SPLITGAUGE_SVHN_TEST_FEATURES");
    bool external_ok = true;
    if (train_path && test_path) {
        FeatureMatrix train_f = io::load_features(train_path);
        FeatureMatrix test_f = io::load_features(test_path);
        AuditConfig real_cfg;
        real_cfg.m = 10000;
        AuditReport r = audit(train_f, test_f, real_cfg);
        external_ok = std::abs(r.within_mean - 3.309) <= 3 * 0.029 &&
                      std::abs(r.cross_mean - 16.687) <= 3 * 0.325 &&
                      r.verdict == Verdict::mismatch;
        ss << ", svhn within " << r.within_mean << " cross " << r.cross_mean
           << (external_ok ? " (in band)" : " (OUT OF BAND)");
    } else {
        ss << ", svhn features not supplied (optional check skipped)";
    }

    detail = ss.str();
    return skew_hits >= 19 && none_hits >= 19 && pixel_skew_hits >= 4 &&
           pixel_none_hits >= 4 && elapsed < 120.0 && external_ok;
}

bool crit6_remix_repair(std::string& detail) {
    auto start = clock_type::now();
    GeneratorSpec spec = bench_spec();
    AuditConfig cfg = bench_audit_config();

    int repaired = 0;
    for (uint64_t trial = 0; trial < 20; ++trial) {
        MismatchSplits skew = inject_mismatch(spec, MismatchMode::density_skew, 0.8,
                                              12000, 6000, 1000 + trial);
        RemixPlan plan = remix(skew.train_labels, skew.test_labels, 3, 5000 + trial);
        RemixedFeatures r = apply_plan_features(plan, skew.train, skew.test,
                                                skew.train_labels, skew.test_labels);
        AuditReport report = audit(r.train, r.test, cfg);
        repaired += report.verdict != Verdict::mismatch && report.gap_ratio < 1.25;
    }
    double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << repaired << "/20 repaired, " << elapsed << " s";
    detail = ss.str();
    return repaired >= 19;
}

bool crit7_remix_invariants(std::string& detail) {
    prng::Stream s(707, "crit7");
    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t k = 1 + static_cast<uint32_t>(s.next_below(8));
        size_t train_n = 1 + s.next_below(400);
        size_t test_n = s.next_below(300);
        std::vector<uint32_t> train(train_n), test(test_n);
        for (uint32_t& l : train)
            l = static_cast<uint32_t>(s.next_below(k));
        for (uint32_t& l : test)
            l = static_cast<uint32_t>(s.next_below(k));

        RemixPlan plan = remix(train, test, k, trial);

        bool ok = plan.new_train.size() == train_n && plan.new_test.size() == test_n;
        std::vector<int> seen_train(train_n, 0), seen_test(test_n, 0);
        std::vector<int> want_train(k, 0), got_train(k, 0), want_test(k, 0), got_test(k, 0);
        for (uint32_t l : train)
            ++want_train[l];
        for (uint32_t l : test)
            ++want_test[l];
        auto visit = [&](const std::vector<SourceRef>& refs, std::vector<int>& got) {
            for (const SourceRef& ref : refs) {
                if (ref.split == SourceSplit::train) {
                    if (ref.index >= train_n || seen_train[ref.index]++)
                        ok = false;
                    else
                        ++got[train[ref.index]];
                } else {
                    if (ref.index >= test_n || seen_test[ref.index]++)
                        ok = false;
                    else
                        ++got[test[ref.index]];
                }
            }
        };
        visit(plan.new_train, got_train);
        visit(plan.new_test, got_test);
        for (size_t i = 0; i < train_n; ++i)
            ok = ok && seen_train[i] == 1;
        for (size_t i = 0; i < test_n; ++i)
            ok = ok && seen_test[i] == 1;
        ok = ok && want_train == got_train && want_test == got_test;
        violations += !ok;
    }
    std::ostringstream ss;
    ss << violations << " violations in 200 configurations";
    detail = ss.str();
    return violations == 0;
}

bool crit8_bpd_sign_flip(std::string& detail) {
    auto start = clock_type::now();
    GeneratorSpec spec = bench_spec();
    GmmFitOptions opt;
    opt.k = 3;
    opt.seed = 0;
    opt.threads = 2;

    int flips = 0, flipbacks = 0;
    for (uint64_t trial = 0; trial < 20; ++trial) {
        MismatchSplits skew = inject_mismatch(spec, MismatchMode::density_skew, 0.8,
                                              15000, 15000, 6000 + trial);
        GmmModel model = fit_gmm(skew.train, opt);
        double train_bpd = bpd(model, skew.train, 2).bpd;
        double test_bpd = bpd(model, skew.test, 2).bpd;
        flips += test_bpd < train_bpd;

        RemixPlan plan = remix(skew.train_labels, skew.test_labels, 3, 7000 + trial);
        RemixedFeatures r = apply_plan_features(plan, skew.train, skew.test,
                                                skew.train_labels, skew.test_labels);
        GmmModel remodel = fit_gmm(r.train, opt);
        double r_train = bpd(remodel, r.train, 2).bpd;
        double r_test = bpd(remodel, r.test, 2).bpd;
        flipbacks += r_test >= r_train - 0.01;
    }
    double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << "flips " << flips << "/20, flip-backs " << flipbacks << "/20, " << elapsed
       << " s";
    detail = ss.str();
    return flips >= 19 && flipbacks >= 19 && elapsed < 120.0;
}

bool crit9_em_monotonic(std::string& detail) {
    prng::Stream s(909, "crit9");
    int monotone = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Index n = 150 + static_cast<Eigen::Index>(s.next_below(150));
        Eigen::Index d = 2 + static_cast<Eigen::Index>(s.next_below(5));
        FeatureMatrix f{random_gauss_matrix(n, d, s), "bench", 0};
        GmmFitOptions opt;
        opt.k = 1 + static_cast<uint32_t>(s.next_below(4));
        opt.seed = trial;
        GmmModel m = fit_gmm(f, opt);
        bool ok = m.fit_trace.size() >= 2;
        for (size_t i = 1; i < m.fit_trace.size(); ++i)
            ok = ok && m.fit_trace[i] >= m.fit_trace[i - 1] - 1e-9;
        monotone += ok;
    }

    // k = 1 closed form: maximum-likelihood moments plus the ridge
    FeatureMatrix f{random_gauss_matrix(400, 4, s), "bench", 0};
    GmmFitOptions opt;
    opt.k = 1;
    opt.reg = 1e-7;
    GmmModel m = fit_gmm(f, opt);
    Eigen::RowVectorXd mean = f.values.colwise().mean();
    Eigen::MatrixXd centered = f.values.rowwise() - mean;
    Eigen::MatrixXd mle = (centered.transpose() * centered) / 400.0;
    mle.diagonal().array() += opt.reg;
    double mean_err = (m.means.row(0) - mean).norm();
    double cov_err = (m.covs[0] - mle).norm();

    std::ostringstream ss;
    ss << monotone << "/50 monotone, k=1 mean err " << mean_err << ", cov err " << cov_err;
    detail = ss.str();
    return monotone == 50 && mean_err <= 1e-9 && cov_err <= 1e-9;
}

bool crit10_determinism(std::string& detail) {
    testsup::TmpDir tmp;
    std::ofstream(tmp.file("gen.json")) << R"({"seed": 1, "n": 600, "components": [
        {"weight": 0.5, "mean": [0, 0, 0, 0], "cov": 1.0},
        {"weight": 0.5, "mean": [3, 3, 0, 0], "cov": 1.0}]})";
    {
        std::ofstream probs(tmp.file("p.csv"));
        for (int i = 0; i < 12; ++i)
            probs << "0.7,0.2,0.1\n";
    }

    auto synth = [&](const std::string& tag) {
        return run_cli("synth --spec " + tmp.file("gen.json") +
                       " --mode density_skew --strength 0.6 --train-n 2400 --test-n 1200 "
                       "--seed 9 --out-train " +
                       tmp.file("a" + tag + ".fm") + " --out-test " +
                       tmp.file("b" + tag + ".fm") + " --out-train-labels " +
                       tmp.file("al" + tag + ".csv") + " --out-test-labels " +
                       tmp.file("bl" + tag + ".csv"));
    };
    if (synth("1") != 0 || synth("2") != 0) {
        detail = "synth run failed";
        return false;
    }
    bool ok = slurp(tmp.file("a1.fm")) == slurp(tmp.file("a2.fm")) &&
              slurp(tmp.file("b1.fm")) == slurp(tmp.file("b2.fm")) &&
              !slurp(tmp.file("a1.fm")).empty();

    auto audit_run = [&](const std::string& tag, int threads) {
        return run_cli("audit --train-features " + tmp.file("a1.fm") +
                       " --test-features " + tmp.file("b1.fm") +
                       " --m 400 --seeds 1,2,3,4,5 --threads " + std::to_string(threads) +
                       " --out " + tmp.file("audit" + tag + ".json"));
    };
    if (audit_run("1", 1) != 0 || audit_run("2", 1) != 0 || audit_run("4", 4) != 0) {
        detail = "audit run failed";
        return false;
    }
    ok = ok && payload_of(tmp.file("audit1.json")) == payload_of(tmp.file("audit2.json"));
    ok = ok && payload_of(tmp.file("audit1.json")) == payload_of(tmp.file("audit4.json"));

    auto fit = [&](const std::string& tag, int threads) {
        return run_cli("fit-density --features " + tmp.file("a1.fm") +
                       " --k 3 --seed 2 --threads " + std::to_string(threads) + " --out " +
                       tmp.file("gmm" + tag + ".json"));
    };
    if (fit("1", 1) != 0 || fit("2", 1) != 0 || fit("4", 4) != 0) {
        detail = "fit-density run failed";
        return false;
    }
    ok = ok && slurp(tmp.file("gmm1.json")) == slurp(tmp.file("gmm2.json"));
    ok = ok && slurp(tmp.file("gmm1.json")) == slurp(tmp.file("gmm4.json"));

    auto bpd_run = [&](const std::string& tag, int threads) {
        return run_cli("bpd --model " + tmp.file("gmm1.json") + " --train-features " +
                       tmp.file("a1.fm") + " --test-features " + tmp.file("b1.fm") +
                       " --threads " + std::to_string(threads) + " --out " +
                       tmp.file("bpd" + tag + ".json"));
    };
    if (bpd_run("1", 1) != 0 || bpd_run("2", 1) != 0 || bpd_run("4", 4) != 0) {
        detail = "bpd run failed";
        return false;
    }
    ok = ok && payload_of(tmp.file("bpd1.json")) == payload_of(tmp.file("bpd2.json"));
    ok = ok && payload_of(tmp.file("bpd1.json")) == payload_of(tmp.file("bpd4.json"));

    auto remix_run = [&](const std::string& tag) {
        return run_cli("remix --train-labels " + tmp.file("al1.csv") + " --test-labels " +
                       tmp.file("bl1.csv") + " --seed 5 --out " +
                       tmp.file("plan" + tag + ".json"));
    };
    if (remix_run("1") != 0 || remix_run("2") != 0) {
        detail = "remix run failed";
        return false;
    }
    ok = ok && slurp(tmp.file("plan1.json")) == slurp(tmp.file("plan2.json"));

    auto embed_run = [&](const std::string& tag, int threads) {
        return run_cli("synth --pixel --classes 3 --height 12 --width 12 --channels 1 "
                       "--noise-sigma 20 --mode none --train-n 300 --test-n 100 --seed 6 "
                       "--out-train " +
                       tmp.file("px" + tag + ".sgtd") + " --out-test " +
                       tmp.file("pxt" + tag + ".sgtd")) ||
               run_cli("embed --data " + tmp.file("px" + tag + ".sgtd") +
                       " --pool-h 4 --pool-w 4 --proj-dim 16 --seed 3 --threads " +
                       std::to_string(threads) + " --out " + tmp.file("e" + tag + ".fm"));
    };
    if (embed_run("1", 1) != 0 || embed_run("2", 1) != 0 || embed_run("4", 4) != 0) {
        detail = "embed run failed";
        return false;
    }
    ok = ok && slurp(tmp.file("px1.sgtd")) == slurp(tmp.file("px2.sgtd"));
    ok = ok && slurp(tmp.file("e1.fm")) == slurp(tmp.file("e2.fm"));
    ok = ok && slurp(tmp.file("e1.fm")) == slurp(tmp.file("e4.fm"));

    auto is_run = [&](const std::string& tag) {
        return run_cli("is --probs " + tmp.file("p.csv") + " --folds 3 --out " +
                       tmp.file("is" + tag + ".json"));
    };
    if (is_run("1") != 0 || is_run("2") != 0) {
        detail = "is run failed";
        return false;
    }
    ok = ok && payload_of(tmp.file("is1.json")) == payload_of(tmp.file("is2.json"));

    detail = ok ? "payloads byte-identical across reruns and threads {1,4}"
                : "payload divergence detected";
    return ok;
}

bool crit11_ingestion(std::string& detail) {
    testsup::TmpDir tmp;
    prng::Stream s(111, "crit11");

    Dataset d;
    d.height = 5;
    d.width = 4;
    d.channels = 3;
    d.class_count = 10;
    d.labels.resize(23);
    for (uint32_t& l : d.labels)
        l = static_cast<uint32_t>(s.next_below(10));
    d.pixels.resize(23 * 5 * 4 * 3);
    for (uint8_t& p : d.pixels)
        p = static_cast<uint8_t>(s.next_below(256));

    // raw round trip, bit exact
    io::write_raw(tmp.file("a.sgtd"), d);
    Dataset back = io::read_raw(tmp.file("a.sgtd"));
    io::write_raw(tmp.file("b.sgtd"), back);
    bool raw_ok = slurp(tmp.file("a.sgtd")) == slurp(tmp.file("b.sgtd")) &&
                  back.pixels == d.pixels && back.labels == d.labels;

    // mat fixture (compressed variant) parses to the same content
    matfix::write_svhn_style(tmp.file("f.mat"), d, true);
    Dataset from_mat = io::read_svhn_mat(tmp.file("f.mat"), false);
    bool mat_ok = from_mat.pixels == d.pixels && from_mat.labels == d.labels;

    // HDF5 signature rejected with the documented message
    std::vector<uint8_t> hdf5 = {0x89, 'H', 'D', 'F', 0x0D, 0x0A, 0x1A, 0x0A};
    hdf5.resize(200, 0);
    {
        std::ofstream out(tmp.file("v73.mat"), std::ios::binary);
        out.write(reinterpret_cast<const char*>(hdf5.data()),
                  static_cast<std::streamsize>(hdf5.size()));
    }
    bool hdf5_ok = false;
    try {
        io::read_svhn_mat(tmp.file("v73.mat"), false);
    } catch (const Error& e) {
        hdf5_ok = e.kind() == ErrorKind::unsupported &&
                  std::string(e.what()).find("v7.3") != std::string::npos;
    }

    std::ostringstream ss;
    ss << "raw " << (raw_ok ? "ok" : "BAD") << ", mat " << (mat_ok ? "ok" : "BAD")
       << ", hdf5 gate " << (hdf5_ok ? "ok" : "BAD");
    detail = ss.str();
    return raw_ok && mat_ok && hdf5_ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance_tests <path-to-splitgauge-cli>\n");
        return 2;
    }
    g_cli_path = argv[1];

    criterion(1, "Frechet matches 1-D and commuting-diagonal closed forms",
              crit1_frechet_closed_forms);
    criterion(2, "PSD square root residual bound up to d = 512", crit2_matrix_sqrt);
    criterion(3, "FID identities: self-distance, symmetry, rigid-motion invariance",
              crit3_fid_identities);
    criterion(4, "IS identities: uniform, balanced one-hot, hand-computed case",
              crit4_is_identities);
    criterion(5, "density-skew mismatch detection (feature + pixel paths)",
              crit5_mismatch_detection);
    criterion(6, "remix repairs the synthetic mismatch", crit6_remix_repair);
    criterion(7, "remix partition/count invariants over 200 configurations",
              crit7_remix_invariants);
    criterion(8, "BPD sign flip under mismatch and flip-back after remix",
              crit8_bpd_sign_flip);
    criterion(9, "EM monotonicity and k = 1 closed form", crit9_em_monotonic);
    criterion(10, "seeded CLI payloads byte-identical across runs and threads",
              crit10_determinism);
    criterion(11, "ingestion: raw round trip, mat fixture, HDF5 gate", crit11_ingestion);

    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
