#include "gaussian_stats.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>

#include "error.hpp"
#include "sym_eigen.hpp"

namespace splitgauge {

namespace {

constexpr double kAsymRelTol = 1e-10;
constexpr double kClampRelTol = 1e-10;
constexpr double kNegEigRelTol = 1e-6;
constexpr double kWarnThreshold = -1e-6;

std::atomic<WarnHandler> g_warn_handler{nullptr};

void default_warn(const char* message) {
    std::fprintf(stderr, "splitgauge: %s\n", message);
}

void warn(const std::string& message) {
    WarnHandler h = g_warn_handler.load();
    (h ? h : default_warn)(message.c_str());
}

void check_symmetric(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols())
        raise(ErrorKind::validation, "matrix square root requires a square matrix");
    double norm = s.norm();
    double asym = (s - s.transpose()).norm();
    if (asym > kAsymRelTol * std::max(1.0, norm))
        raise(ErrorKind::validation,
              "matrix is not symmetric (relative asymmetry " +
                  std::to_string(norm > 0 ? asym / norm : asym) + ")");
}

// Eigenvalues of the symmetrized input with the shared clamp rule applied:
// tiny negatives (above -1e-6 * lambda_max) are zeroed, larger ones reject.
void clamp_spectrum(Eigen::VectorXd& eigs, const char* what) {
    double lambda_max = eigs.size() > 0 ? eigs.maxCoeff() : 0.0;
    if (lambda_max < 0.0)
        raise(ErrorKind::validation, std::string(what) + ": matrix is negative definite");
    double clamp_tol = kClampRelTol * lambda_max;
    double reject_tol = -kNegEigRelTol * lambda_max;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (eigs[i] < reject_tol)
            raise(ErrorKind::validation,
                  std::string(what) + ": eigenvalue " + std::to_string(eigs[i]) +
                      " below PSD tolerance " + std::to_string(reject_tol));
        if (eigs[i] < clamp_tol)
            eigs[i] = 0.0;
    }
}

}  // namespace

WarnHandler set_frechet_warn_handler(WarnHandler handler) {
    return g_warn_handler.exchange(handler);
}

GaussianSummary summarize(const FeatureMatrix& f) {
    const Eigen::Index n = f.rows();
    if (n < 2)
        raise(ErrorKind::validation,
              "summarize: need at least 2 samples, got " + std::to_string(n));
    GaussianSummary g;
    g.sample_count = n;
    g.mean = f.values.colwise().mean();
    Eigen::MatrixXd centered = f.values.rowwise() - g.mean.transpose();
    g.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    g.cov = ((g.cov + g.cov.transpose()) * 0.5).eval();
    return g;
}

GaussianSummary jittered(const GaussianSummary& g, double eps) {
    if (eps < 0)
        raise(ErrorKind::validation, "jitter must be nonnegative");
    GaussianSummary out = g;
    out.cov.diagonal().array() += eps;
    return out;
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& s) {
    check_symmetric(s);
    Eigen::MatrixXd sym = (s + s.transpose()) * 0.5;
    Eigen::VectorXd eigs;
    Eigen::MatrixXd vecs;
    sym_eigen(sym, eigs, vecs);
    clamp_spectrum(eigs, "sqrt_psd");
    // R = (V q)(V q)^T with q = diag(lambda^{1/4}): one syrk instead of two
    // gemms, and the result is exactly symmetric.
    for (Eigen::Index c = 0; c < vecs.cols(); ++c)
        vecs.col(c) *= std::pow(eigs[c], 0.25);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
    r.selfadjointView<Eigen::Lower>().rankUpdate(vecs);
    return r.selfadjointView<Eigen::Lower>();
}

double frechet(const GaussianSummary& g1, const GaussianSummary& g2) {
    if (g1.dim() != g2.dim())
        raise(ErrorKind::validation,
              "frechet: dimension mismatch (" + std::to_string(g1.dim()) + " vs " +
                  std::to_string(g2.dim()) + ")");

    Eigen::MatrixXd root1 = sqrt_psd(g1.cov);
    Eigen::MatrixXd inner = root1 * g2.cov * root1;
    inner = ((inner + inner.transpose()) * 0.5).eval();
    Eigen::VectorXd eigs;
    sym_eigenvalues(inner, eigs);
    // inner is PSD by construction; any negative eigenvalue here is roundoff.
    double cross = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        cross += std::sqrt(std::max(0.0, eigs[i]));

    double raw = (g1.mean - g2.mean).squaredNorm() + g1.cov.trace() + g2.cov.trace() -
                 2.0 * cross;
    if (raw < kWarnThreshold)
        warn("frechet: clamping raw value " + std::to_string(raw) + " to 0");
    return std::max(0.0, raw);
}

}  // namespace splitgauge
