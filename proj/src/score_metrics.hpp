#pragma once

#include <Eigen/Core>
#include <vector>

#include "types.hpp"

namespace splitgauge {

struct IsResult {
    double score = 1.0;
    double mean_kl = 0.0;
    Eigen::VectorXd marginal;
};

// Inception Score over classifier posteriors: exp of the mean per-row KL
// divergence to the marginal row-mean. Natural log internally, entries
// clamped at 1e-12 before the log, one expectation over the full set.
IsResult inception_score(const ProbMatrix& p);

// Fold-averaged variant (off by default in the CLI): the rows are split into
// `folds` contiguous folds and the score is computed per fold.
std::vector<IsResult> inception_score_folds(const ProbMatrix& p, int folds);

}  // namespace splitgauge
