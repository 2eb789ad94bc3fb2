#include "score_metrics.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace splitgauge {

namespace {

constexpr double kLogClamp = 1e-12;

IsResult score_block(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    IsResult r;
    r.marginal = rows.colwise().mean();
    double kl_sum = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        double kl = 0.0;
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            double p = std::max(rows(i, j), kLogClamp);
            double q = std::max(r.marginal[j], kLogClamp);
            kl += rows(i, j) * (std::log(p) - std::log(q));
        }
        kl_sum += kl;
    }
    r.mean_kl = kl_sum / static_cast<double>(rows.rows());
    r.score = std::exp(r.mean_kl);
    return r;
}

}  // namespace

IsResult inception_score(const ProbMatrix& p) {
    if (p.count() < 1)
        raise(ErrorKind::validation, "inception_score: empty probability matrix");
    return score_block(p.rows);
}

std::vector<IsResult> inception_score_folds(const ProbMatrix& p, int folds) {
    if (folds < 1)
        raise(ErrorKind::validation, "inception_score: folds must be >= 1");
    if (p.count() < folds)
        raise(ErrorKind::validation,
              "inception_score: fewer rows (" + std::to_string(p.count()) +
                  ") than folds (" + std::to_string(folds) + ")");
    std::vector<IsResult> out;
    out.reserve(folds);
    const Eigen::Index n = p.count();
    for (int f = 0; f < folds; ++f) {
        Eigen::Index begin = n * f / folds;
        Eigen::Index end = n * (f + 1) / folds;
        out.push_back(score_block(p.rows.middleRows(begin, end - begin)));
    }
    return out;
}

}  // namespace splitgauge
