#pragma once

#include <Eigen/Core>

namespace splitgauge {

// Eigendecomposition of a symmetric matrix, ascending eigenvalues. Backed by
// LAPACK's divide-and-conquer dsyevd when available (about 4x faster than
// Eigen's QL iteration at d = 512), Eigen's SelfAdjointEigenSolver otherwise.
void sym_eigen(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues,
               Eigen::MatrixXd& eigenvectors);

void sym_eigenvalues(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues);

}  // namespace splitgauge
