#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace splitgauge {

// Gaussian mixture density model fitted by EM in feature space.
struct GmmModel {
    Eigen::VectorXd weights;              // k-simplex
    Eigen::MatrixXd means;                // k x d
    std::vector<Eigen::MatrixXd> covs;    // k of d x d, PD after regularization
    std::vector<double> fit_trace;        // mean log-likelihood per iteration
    bool diagonal = false;
    double reg = 0.0;
    uint64_t seed = 0;

    Eigen::Index components() const { return weights.size(); }
    Eigen::Index dim() const { return means.cols(); }
};

struct GmmFitOptions {
    uint32_t k = 1;
    uint64_t seed = 0;
    double tol = 1e-6;
    uint32_t max_iter = 200;
    double reg = -1.0;  // < 0 selects the default 1e-6 * mean data variance
    bool diagonal = false;
    int threads = 1;
};

// The auto-regularization used when GmmFitOptions::reg < 0.
double default_regularization(const FeatureMatrix& f);

// EM with a seeded farthest-point initialization and log-sum-exp
// responsibilities. Covariances get reg * I added each M-step. Stops when
// the mean log-likelihood improves by less than tol, or at max_iter. Rows
// may be processed in parallel; reductions are fixed-order, so the fit is
// identical across thread counts.
GmmModel fit_gmm(const FeatureMatrix& f, const GmmFitOptions& options);

struct BpdResult {
    double bpd = 0.0;
    double mean_nll_nats = 0.0;
    int64_t n = 0;
    int64_t d = 0;
};

// Bits per dimension of the evaluation set under the model:
// bpd = mean_nll_nats / (d * ln 2), mixture likelihood via log-sum-exp.
BpdResult bpd(const GmmModel& model, const FeatureMatrix& f, int threads = 1);

std::string gmm_to_json(const GmmModel& model);
GmmModel gmm_from_json(const std::string& json_text);

}  // namespace splitgauge
