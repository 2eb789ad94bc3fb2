#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "types.hpp"

namespace splitgauge {

// Mean and unbiased covariance (divisor n - 1) of a feature matrix. The
// covariance is symmetrized on construction; downstream code may assume it
// stays symmetric and numerically PSD.
struct GaussianSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    int64_t sample_count = 0;

    Eigen::Index dim() const { return mean.size(); }
};

GaussianSummary summarize(const FeatureMatrix& f);

// Returns a copy with eps * I added to the covariance; the opt-in escape
// hatch for near-singular covariances (n <= d).
GaussianSummary jittered(const GaussianSummary& g, double eps);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below
// 1e-10 * lambda_max are clamped to zero; asymmetry beyond tolerance or an
// eigenvalue below -1e-6 * lambda_max is an error. The result R satisfies
// ||R*R - S||_F <= 1e-8 * max(1, ||S||_F).
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& s);

// Squared Frechet (2-Wasserstein) distance between the two Gaussians:
//   ||mu1 - mu2||^2 + Tr(S1) + Tr(S2) - 2 Tr((S1^{1/2} S2 S1^{1/2})^{1/2}).
// The cross term uses the symmetrized product, never the nonsymmetric S1*S2,
// which is trace-equivalent and keeps the arithmetic real. Result is clamped
// to [0, inf); a raw value below -1e-6 is reported through the warn handler.
double frechet(const GaussianSummary& g1, const GaussianSummary& g2);

// Hook for clamp warnings (defaults to stderr). Returns the previous handler.
using WarnHandler = void (*)(const char* message);
WarnHandler set_frechet_warn_handler(WarnHandler handler);

}  // namespace splitgauge
