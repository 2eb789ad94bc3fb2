#include "sym_eigen.hpp"

#ifdef SPLITGAUGE_HAVE_LAPACKE
#include <lapacke.h>
#endif

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace splitgauge {

#ifdef SPLITGAUGE_HAVE_LAPACKE

// BLAS-internal threading is an outside source of nondeterminism (and of
// contention when the caller already parallelizes), so pin it to one thread.
// Weak symbol: resolves only when the linked LAPACK is OpenBLAS.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {

void pin_blas_threads() {
    static const bool done = [] {
        if (openblas_set_num_threads)
            openblas_set_num_threads(1);
        return true;
    }();
    (void)done;
}

void dsyevd(char jobz, Eigen::MatrixXd& a, Eigen::VectorXd& w) {
    pin_blas_threads();
    lapack_int n = static_cast<lapack_int>(a.rows());
    w.resize(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(),
                                     n, w.data());
    if (info != 0)
        raise(ErrorKind::internal,
              "dsyevd failed with info " + std::to_string(info));
}

}  // namespace

void sym_eigen(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues,
               Eigen::MatrixXd& eigenvectors) {
    eigenvectors = s;
    dsyevd('V', eigenvectors, eigenvalues);
}

void sym_eigenvalues(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues) {
    Eigen::MatrixXd scratch = s;
    dsyevd('N', scratch, eigenvalues);
}

#else

void sym_eigen(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues,
               Eigen::MatrixXd& eigenvectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success)
        raise(ErrorKind::internal, "symmetric eigendecomposition failed");
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
}

void sym_eigenvalues(const Eigen::MatrixXd& s, Eigen::VectorXd& eigenvalues) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        raise(ErrorKind::internal, "symmetric eigendecomposition failed");
    eigenvalues = solver.eigenvalues();
}

#endif

}  // namespace splitgauge
