#include "density_probe.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "error.hpp"
#include "prng.hpp"

namespace splitgauge {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

// Cholesky factor plus the log-determinant, one per component.
struct ComponentDensity {
    Eigen::MatrixXd chol_lower;
    Eigen::VectorXd mean;
    double log_norm;  // -0.5 * (d*ln(2pi) + logdet)
    double log_weight;
};

std::vector<ComponentDensity> prepare_densities(const GmmModel& model) {
    std::vector<ComponentDensity> out;
    out.reserve(model.components());
    for (Eigen::Index k = 0; k < model.components(); ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(model.covs[k]);
        if (llt.info() != Eigen::Success)
            raise(ErrorKind::validation,
                  "gmm: component " + std::to_string(k) +
                      " covariance is not positive definite; increase the regularization");
        ComponentDensity cd;
        cd.chol_lower = llt.matrixL();
        cd.mean = model.means.row(k);
        double logdet = 2.0 * cd.chol_lower.diagonal().array().log().sum();
        cd.log_norm = -0.5 * (static_cast<double>(model.dim()) * kLog2Pi + logdet);
        cd.log_weight = model.weights[k] > 0.0 ? std::log(model.weights[k])
                                               : -std::numeric_limits<double>::infinity();
        out.push_back(std::move(cd));
    }
    return out;
}

// log p(x | component); solves L z = (x - mu) in place.
double component_log_density(const ComponentDensity& cd, const Eigen::VectorXd& x,
                             Eigen::VectorXd& scratch) {
    scratch = x - cd.mean;
    cd.chol_lower.triangularView<Eigen::Lower>().solveInPlace(scratch);
    return cd.log_norm - 0.5 * scratch.squaredNorm();
}

void parallel_rows(Eigen::Index n, int threads, const std::function<void(Eigen::Index, Eigen::Index)>& body) {
    int workers = std::max(1, threads);
    if (workers == 1 || n < 2) {
        body(0, n);
        return;
    }
    workers = static_cast<int>(std::min<Eigen::Index>(workers, n));
    Eigen::Index chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        Eigen::Index b = t * chunk;
        Eigen::Index e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    for (std::thread& th : pool)
        th.join();
}

// Seeded farthest-point initialization: random first center, then the point
// maximizing the distance to the chosen set; ties break to the lowest index.
std::vector<Eigen::Index> farthest_point_init(const Eigen::MatrixXd& x, uint32_t k,
                                              uint64_t seed) {
    const Eigen::Index n = x.rows();
    prng::Stream stream(seed, "gmm-init");
    std::vector<Eigen::Index> centers;
    centers.push_back(static_cast<Eigen::Index>(stream.next_below(n)));
    Eigen::VectorXd min_dist =
        (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
    while (centers.size() < k) {
        Eigen::Index best = 0;
        double best_dist = -1.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (min_dist[i] > best_dist) {
                best_dist = min_dist[i];
                best = i;
            }
        centers.push_back(best);
        Eigen::VectorXd d = (x.rowwise() - x.row(best)).rowwise().squaredNorm();
        min_dist = min_dist.cwiseMin(d);
    }
    return centers;
}

}  // namespace

double default_regularization(const FeatureMatrix& f) {
    const Eigen::Index n = f.rows();
    if (n < 2)
        return 1e-6;
    Eigen::RowVectorXd mean = f.values.colwise().mean();
    double var = (f.values.rowwise() - mean).squaredNorm() /
                 static_cast<double>((n - 1) * f.dim());
    return 1e-6 * std::max(var, std::numeric_limits<double>::min());
}

GmmModel fit_gmm(const FeatureMatrix& f, const GmmFitOptions& options) {
    const Eigen::Index n = f.rows();
    const Eigen::Index d = f.dim();
    const uint32_t k = options.k;
    if (k < 1)
        raise(ErrorKind::validation, "fit_gmm: k must be >= 1");
    if (n < static_cast<Eigen::Index>(k))
        raise(ErrorKind::validation, "fit_gmm: need at least k = " + std::to_string(k) +
                                         " samples, got " + std::to_string(n));
    double reg = options.reg < 0.0 ? default_regularization(f) : options.reg;

    const Eigen::MatrixXd& x = f.values;

    GmmModel model;
    model.diagonal = options.diagonal;
    model.reg = reg;
    model.seed = options.seed;
    model.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    model.means.resize(k, d);
    std::vector<Eigen::Index> centers = farthest_point_init(x, k, options.seed);
    for (uint32_t j = 0; j < k; ++j)
        model.means.row(j) = x.row(centers[j]);

    Eigen::RowVectorXd grand_mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - grand_mean;
    Eigen::MatrixXd shared_cov = (centered.transpose() * centered) / static_cast<double>(n);
    if (options.diagonal)
        shared_cov = shared_cov.diagonal().asDiagonal();
    shared_cov.diagonal().array() += reg;
    model.covs.assign(k, shared_cov);

    Eigen::MatrixXd resp(n, k);       // responsibilities, filled per row
    Eigen::VectorXd row_ll(n);        // per-row log-likelihood
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (uint32_t iter = 0;; ++iter) {
        // E-step. Rows are independent; the reduction below runs in fixed
        // row order, so thread count cannot change the result.
        std::vector<ComponentDensity> densities = prepare_densities(model);
        parallel_rows(n, options.threads, [&](Eigen::Index begin, Eigen::Index end) {
            Eigen::VectorXd scratch(d), logp(k), xi(d);
            for (Eigen::Index i = begin; i < end; ++i) {
                xi = x.row(i);
                double max_lp = -std::numeric_limits<double>::infinity();
                for (uint32_t j = 0; j < k; ++j) {
                    logp[j] = densities[j].log_weight +
                              component_log_density(densities[j], xi, scratch);
                    max_lp = std::max(max_lp, logp[j]);
                }
                double sum = 0.0;
                for (uint32_t j = 0; j < k; ++j)
                    sum += std::exp(logp[j] - max_lp);
                double lse = max_lp + std::log(sum);
                row_ll[i] = lse;
                for (uint32_t j = 0; j < k; ++j)
                    resp(i, j) = std::exp(logp[j] - lse);
            }
        });
        double ll = row_ll.sum() / static_cast<double>(n);
        if (!std::isfinite(ll))
            raise(ErrorKind::validation,
                  "fit_gmm: non-finite log-likelihood (degenerate input)");
        model.fit_trace.push_back(ll);

        if (iter > 0 && ll - prev_ll < options.tol)
            break;
        if (iter >= options.max_iter)
            break;
        prev_ll = ll;

        // M-step (MLE with ridge). Serial Eigen products keep this exact.
        Eigen::VectorXd nk = resp.colwise().sum();
        for (uint32_t j = 0; j < k; ++j) {
            if (nk[j] < 1e-12)  // starved component: leave it untouched
                continue;
            model.weights[j] = nk[j] / static_cast<double>(n);
            model.means.row(j) = (resp.col(j).transpose() * x) / nk[j];
            Eigen::MatrixXd c = x.rowwise() - model.means.row(j);
            Eigen::MatrixXd cov =
                (c.transpose() * (c.array().colwise() * resp.col(j).array()).matrix()) / nk[j];
            if (options.diagonal)
                cov = cov.diagonal().asDiagonal();
            cov.diagonal().array() += reg;
            model.covs[j] = ((cov + cov.transpose()) * 0.5).eval();
        }
        model.weights /= model.weights.sum();
    }
    return model;
}

BpdResult bpd(const GmmModel& model, const FeatureMatrix& f, int threads) {
    if (model.dim() != f.dim())
        raise(ErrorKind::validation,
              "bpd: model dimension " + std::to_string(model.dim()) +
                  " does not match feature dimension " + std::to_string(f.dim()));
    const Eigen::Index n = f.rows();
    if (n < 1)
        raise(ErrorKind::validation, "bpd: empty evaluation set");

    std::vector<ComponentDensity> densities = prepare_densities(model);
    Eigen::VectorXd row_ll(n);
    parallel_rows(n, threads, [&](Eigen::Index begin, Eigen::Index end) {
        Eigen::VectorXd scratch(model.dim()), xi(model.dim());
        Eigen::Index k = model.components();
        Eigen::VectorXd logp(k);
        for (Eigen::Index i = begin; i < end; ++i) {
            xi = f.values.row(i);
            double max_lp = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < k; ++j) {
                logp[j] = densities[j].log_weight +
                          component_log_density(densities[j], xi, scratch);
                max_lp = std::max(max_lp, logp[j]);
            }
            double sum = 0.0;
            for (Eigen::Index j = 0; j < k; ++j)
                sum += std::exp(logp[j] - max_lp);
            row_ll[i] = max_lp + std::log(sum);
        }
    });

    BpdResult r;
    r.n = n;
    r.d = model.dim();
    r.mean_nll_nats = -row_ll.sum() / static_cast<double>(n);
    r.bpd = r.mean_nll_nats / (static_cast<double>(r.d) * std::numbers::ln2);
    return r;
}

std::string gmm_to_json(const GmmModel& model) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["type"] = "gmm";
    j["k"] = model.components();
    j["d"] = model.dim();
    j["diagonal"] = model.diagonal;
    j["reg"] = model.reg;
    j["seed"] = model.seed;
    j["weights"] = std::vector<double>(model.weights.data(),
                                       model.weights.data() + model.weights.size());
    nlohmann::json means = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.means.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < model.means.cols(); ++c)
            row.push_back(model.means(i, c));
        means.push_back(std::move(row));
    }
    j["means"] = std::move(means);
    nlohmann::json covs = nlohmann::json::array();
    for (const Eigen::MatrixXd& cov : model.covs) {
        nlohmann::json mat = nlohmann::json::array();
        for (Eigen::Index r = 0; r < cov.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < cov.cols(); ++c)
                row.push_back(cov(r, c));
            mat.push_back(std::move(row));
        }
        covs.push_back(std::move(mat));
    }
    j["covs"] = std::move(covs);
    j["fit_trace"] = model.fit_trace;
    return j.dump(2);
}

GmmModel gmm_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::format, std::string("gmm: invalid JSON: ") + e.what());
    }
    try {
        if (j.value("type", "") != "gmm")
            raise(ErrorKind::format, "gmm: JSON is not a gmm model");
        GmmModel m;
        m.diagonal = j.value("diagonal", false);
        m.reg = j.value("reg", 0.0);
        m.seed = j.value("seed", uint64_t{0});
        auto weights = j.at("weights").get<std::vector<double>>();
        size_t k = weights.size();
        auto means = j.at("means").get<std::vector<std::vector<double>>>();
        auto covs = j.at("covs").get<std::vector<std::vector<std::vector<double>>>>();
        if (k == 0 || means.size() != k || covs.size() != k)
            raise(ErrorKind::validation, "gmm: component count mismatch in JSON");
        size_t d = means[0].size();
        if (d == 0)
            raise(ErrorKind::validation, "gmm: zero dimension");
        m.weights.resize(k);
        m.means.resize(k, d);
        double wsum = 0.0;
        for (size_t i = 0; i < k; ++i) {
            if (weights[i] < 0)
                raise(ErrorKind::validation, "gmm: negative weight");
            wsum += weights[i];
            m.weights[static_cast<Eigen::Index>(i)] = weights[i];
            if (means[i].size() != d)
                raise(ErrorKind::validation, "gmm: ragged means");
            for (size_t c = 0; c < d; ++c)
                m.means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    means[i][c];
            Eigen::MatrixXd cov(d, d);
            if (covs[i].size() != d)
                raise(ErrorKind::validation, "gmm: covariance dimension mismatch");
            for (size_t r = 0; r < d; ++r) {
                if (covs[i][r].size() != d)
                    raise(ErrorKind::validation, "gmm: ragged covariance");
                for (size_t c = 0; c < d; ++c)
                    cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        covs[i][r][c];
            }
            m.covs.push_back(std::move(cov));
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            raise(ErrorKind::validation, "gmm: weights do not sum to 1");
        if (j.contains("fit_trace"))
            m.fit_trace = j.at("fit_trace").get<std::vector<double>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::format, std::string("gmm: malformed model JSON: ") + e.what());
    }
}

}  // namespace splitgauge
