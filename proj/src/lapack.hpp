#pragma once

// Thin wrappers around the Fortran LAPACK entry points shipped with OpenBLAS.
// Kept out of the public headers so the rest of the library stays plain Eigen.

#include <Eigen/Dense>

#include <vector>

#include "bec/types.hpp"

extern "C" {
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda, int* info);
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
             const int* lda, double* w, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
void dgesdd_(const char* jobz, const int* m, const int* n, double* a,
             const int* lda, double* s, double* u, const int* ldu, double* vt,
             const int* ldvt, double* work, const int* lwork, int* iwork,
             int* info);
void dgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n,
             double* a, const int* lda, double* s, double* u, const int* ldu,
             double* vt, const int* ldvt, double* work, const int* lwork,
             int* info);
}

namespace bec::lapack {

// In-place lower Cholesky; returns false when not positive definite.
inline bool cholesky_lower(Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    int info = 0;
    dpotrf_("L", &n, a.data(), &n, &info);
    if (info < 0) throw Error("dpotrf: bad argument");
    if (info > 0) return false;
    a.triangularView<Eigen::StrictlyUpper>().setZero();
    return true;
}

inline void sym_eig(Eigen::MatrixXd a, Eigen::VectorXd& w,
                    Eigen::MatrixXd* vectors = nullptr) {
    const int n = static_cast<int>(a.rows());
    w.resize(n);
    const char* jobz = vectors ? "V" : "N";
    int info = 0, lwork = -1, liwork = -1;
    double wk = 0;
    int iwk = 0;
    dsyevd_(jobz, "L", &n, a.data(), &n, w.data(), &wk, &lwork, &iwk, &liwork, &info);
    lwork = static_cast<int>(wk);
    liwork = iwk;
    std::vector<double> work(std::max(1, lwork));
    std::vector<int> iwork(std::max(1, liwork));
    dsyevd_(jobz, "L", &n, a.data(), &n, w.data(), work.data(), &lwork,
            iwork.data(), &liwork, &info);
    if (info != 0) throw Error("dsyevd failed");
    if (vectors) *vectors = std::move(a);
}

// Full SVD a = u * diag(s) * vt.
inline void svd(Eigen::MatrixXd a, Eigen::MatrixXd& u, Eigen::VectorXd& s,
                Eigen::MatrixXd& vt) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    const int mn = std::min(m, n);
    u.resize(m, m);
    vt.resize(n, n);
    s.resize(mn);
    Eigen::MatrixXd backup = a;
    int info = 0, lwork = -1;
    double wk = 0;
    std::vector<int> iwork(8 * mn);
    dgesdd_("A", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &n,
            &wk, &lwork, iwork.data(), &info);
    lwork = static_cast<int>(wk);
    std::vector<double> work(std::max(1, lwork));
    dgesdd_("A", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &n,
            work.data(), &lwork, iwork.data(), &info);
    if (info == 0) return;
    // divide-and-conquer occasionally fails to converge on graded matrices;
    // retry with the QR-iteration driver before giving up
    a = std::move(backup);
    lwork = -1;
    dgesvd_("A", "A", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(),
            &n, &wk, &lwork, &info);
    lwork = static_cast<int>(wk);
    work.resize(std::max(1, lwork));
    dgesvd_("A", "A", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(),
            &n, work.data(), &lwork, &info);
    if (info != 0) throw Error("svd failed");
}

}  // namespace bec::lapack
