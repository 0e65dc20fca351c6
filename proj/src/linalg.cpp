#include "bec/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <vector>

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double coth(double x) {
    if (x > 350.0) return 1.0;
    if (x < -350.0) return -1.0;
    // coth(x) = 1 + 2/(e^{2x} - 1); expm1 keeps small x accurate.
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

MatrixXd SymplecticForm::matrix() const {
    const int n = n_modes;
    MatrixXd om = MatrixXd::Zero(2 * n, 2 * n);
    om.topRightCorner(n, n) = MatrixXd::Identity(n, n);
    om.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
    return om;
}

MatrixXd SymplecticForm::mul_left(const MatrixXd& m) const {
    const int n = n_modes;
    if (m.rows() != 2 * n)
        throw DimensionMismatchError("symplectic form size mismatch");
    MatrixXd out(m.rows(), m.cols());
    out.topRows(n) = m.bottomRows(n);
    out.bottomRows(n) = -m.topRows(n);
    return out;
}

namespace {

void require_symmetric(const MatrixXd& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionMismatchError(std::string(what) + ": not square");
    const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw NonSymmetricError(std::string(what) + ": asymmetry " +
                                std::to_string(asym / scale));
}

// Symmetric square root; throws if not positive definite.
MatrixXd psd_sqrt(const MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw Error(std::string(what) + ": eigensolver failure");
    const double lmax = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, lmax))
        throw NotPositiveDefiniteError(std::string(what) +
                                       ": matrix not positive definite");
    return es.eigenvectors() *
           es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(MatrixXd entries, double eta,
                                   double physicality_tol) {
    if (eta <= 0.0) throw NonPositiveInputError("eta must be positive");
    require_symmetric(entries, "covariance matrix");
    if (entries.rows() % 2 != 0)
        throw DimensionMismatchError("covariance matrix must be 2N x 2N");
    n_modes_ = static_cast<int>(entries.rows()) / 2;
    eta_ = eta;
    entries_ = 0.5 * (entries + entries.transpose());
    if (physicality_tol >= 0.0) {
        const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
        if (!check_uncertainty(*this, physicality_tol * scale))
            throw UnphysicalInputError(
                "covariance matrix violates the uncertainty relation");
    }
}

CovarianceMatrix CovarianceMatrix::trusted(MatrixXd entries, double eta) {
    CovarianceMatrix g;
    g.n_modes_ = static_cast<int>(entries.rows()) / 2;
    g.eta_ = eta;
    g.entries_ = std::move(entries);
    return g;
}

SymplecticEigen symplectic_eigenvalues(const CovarianceMatrix& gamma,
                                       bool with_transform) {
    const int n = gamma.n_modes();
    const MatrixXd& g = gamma.entries();
    require_symmetric(g, "symplectic_eigenvalues");

    const MatrixXd a = psd_sqrt(g, "symplectic_eigenvalues");
    const SymplecticForm om{n, gamma.eta()};
    const MatrixXd k = a * om.mul_left(a);  // antisymmetric (up to eta-free Omega)

    SymplecticEigen out;
    if (!with_transform) {
        // Eigenvalues of K K^T are the nu_j^2, each with multiplicity two.
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(k * k.transpose());
        VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        std::sort(sq.data(), sq.data() + sq.size());
        const double scale = std::max(1e-300, sq(2 * n - 1));
        out.values.resize(n);
        for (int j = 0; j < n; ++j) {
            const double lo = sq(2 * j), hi = sq(2 * j + 1);
            if (hi - lo > 1e-9 * scale)
                throw Error("symplectic eigenvalue pair mismatch");
            out.values(j) = 0.5 * (lo + hi);
        }
        return out;
    }

    // Williamson transform: bring the antisymmetric K to its canonical form
    // Q^T K Q = ⊕_j nu_j * [[0,1],[-1,0]] with an orthogonal Q (real Schur),
    // then S = K^{1/2}... here S = A Q Dt^{-1/2} P^T in the global ordering.
    Eigen::RealSchur<MatrixXd> schur(k);
    MatrixXd t = schur.matrixT();
    MatrixXd q = schur.matrixU();
    const double tscale = std::max(1.0, t.cwiseAbs().maxCoeff());

    std::vector<std::pair<double, int>> order;  // (nu, 2x2 block start)
    for (int i = 0; i < 2 * n;) {
        if (i + 1 >= 2 * n || std::abs(t(i + 1, i)) < 1e-13 * tscale)
            throw Error("unexpected 1x1 block in antisymmetric Schur form");
        double b = t(i, i + 1);
        if (b < 0) {  // swap the pair's columns so the block reads [[0,nu],[-nu,0]]
            q.col(i).swap(q.col(i + 1));
            b = -b;
        }
        order.emplace_back(b, i);
        i += 2;
    }
    std::sort(order.begin(), order.end());

    out.values.resize(n);
    MatrixXd s(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        const double nu = order[j].first;
        out.values(j) = nu;
        const int src = order[j].second;
        const double inv = 1.0 / std::sqrt(nu);
        // interleaved pair (2j, 2j+1) maps to global columns (j, n+j)
        s.col(j) = a * q.col(src) * inv;
        s.col(n + j) = a * q.col(src + 1) * inv;
    }
    // verify symplecticity before returning the transform
    const MatrixXd somst = s * om.matrix() * s.transpose();
    if ((somst - om.matrix()).cwiseAbs().maxCoeff() > 1e-8)
        out.transform = std::nullopt;
    else
        out.transform = s;
    return out;
}

bool check_uncertainty(const CovarianceMatrix& gamma, double tol) {
    const MatrixXd& g = gamma.entries();
    require_symmetric(g, "check_uncertainty");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    const double lmax = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, lmax))
        return false;  // a physical Gamma is necessarily positive definite
    try {
        const SymplecticEigen se = symplectic_eigenvalues(gamma);
        return se.values.minCoeff() >= gamma.eta() - tol;
    } catch (const Error&) {
        return false;
    }
}

Eigen::MatrixXd hermitian_psd_embed(const MatrixXd& real_part,
                                    const MatrixXd& imag_part) {
    const auto n = real_part.rows();
    if (real_part.cols() != n || imag_part.rows() != n || imag_part.cols() != n)
        throw DimensionMismatchError("hermitian_psd_embed: shape mismatch");
    const double scale =
        std::max({1e-300, real_part.cwiseAbs().maxCoeff(), imag_part.cwiseAbs().maxCoeff()});
    if ((real_part - real_part.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetricError("hermitian_psd_embed: real part not symmetric");
    if ((imag_part + imag_part.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetricError("hermitian_psd_embed: imag part not antisymmetric");
    MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = real_part;
    out.topRightCorner(n, n) = -imag_part;
    out.bottomLeftCorner(n, n) = imag_part;
    out.bottomRightCorner(n, n) = real_part;
    return out;
}

Eigen::MatrixXd matrix_exponential(const MatrixXd& a, double t) {
    if (a.rows() != a.cols())
        throw DimensionMismatchError("matrix_exponential: not square");
    if (!a.allFinite() || !std::isfinite(t))
        throw OverflowError("matrix_exponential: non-finite input");
    const MatrixXd at = a * t;
    if (at.cwiseAbs().maxCoeff() > 1e6)
        throw OverflowError("matrix_exponential: norm too large");
    MatrixXd out = at.exp();
    if (!out.allFinite())
        throw OverflowError("matrix_exponential: result overflowed");
    return out;
}

namespace {

// Solve the small Sylvester system Tii*Y + Y*Tjj^T = C (blocks up to 2x2)
// by Kronecker vectorization.
MatrixXd small_sylvester(const MatrixXd& tii, const MatrixXd& tjj, const MatrixXd& c) {
    const auto ni = tii.rows(), nj = tjj.rows();
    MatrixXd m = MatrixXd::Zero(ni * nj, ni * nj);
    // vec(Tii*Y) = (I ⊗ Tii) vec(Y); vec(Y*Tjj^T) = (Tjj ⊗ I) vec(Y)
    for (Eigen::Index p = 0; p < nj; ++p)
        m.block(p * ni, p * ni, ni, ni) += tii;
    for (Eigen::Index p = 0; p < nj; ++p)
        for (Eigen::Index q = 0; q < nj; ++q)
            m.block(p * ni, q * ni, ni, ni) +=
                tjj(p, q) * MatrixXd::Identity(ni, ni);
    Eigen::Map<const VectorXd> cv(c.data(), ni * nj);
    VectorXd y = m.fullPivLu().solve(cv);
    return Eigen::Map<const MatrixXd>(y.data(), ni, nj);
}

}  // namespace

Eigen::MatrixXd solve_lyapunov_steady(const MatrixXd& g_drift,
                                      const MatrixXd& d_diss) {
    const auto n = g_drift.rows();
    if (g_drift.cols() != n || d_diss.rows() != n || d_diss.cols() != n)
        throw DimensionMismatchError("solve_lyapunov_steady: shape mismatch");
    require_symmetric(d_diss, "solve_lyapunov_steady dissipation");

    Eigen::RealSchur<MatrixXd> schur(g_drift);
    const MatrixXd& t = schur.matrixT();
    const MatrixXd& u = schur.matrixU();
    const double tscale = std::max(1.0, t.cwiseAbs().maxCoeff());

    // block boundaries of the quasi-triangular factor
    std::vector<Eigen::Index> start;
    for (Eigen::Index i = 0; i < n;) {
        start.push_back(i);
        if (i + 1 < n && std::abs(t(i + 1, i)) > 1e-14 * tscale)
            i += 2;
        else
            i += 1;
    }
    const int nb = static_cast<int>(start.size());
    auto bsize = [&](int b) {
        return (b + 1 < nb ? start[b + 1] : n) - start[b];
    };

    // Hurwitz check from the Schur blocks
    for (int b = 0; b < nb; ++b) {
        const Eigen::Index i = start[b];
        const double re =
            bsize(b) == 1 ? t(i, i) : 0.5 * (t(i, i) + t(i + 1, i + 1));
        if (re >= -1e-12 * tscale)
            throw NotHurwitzError("drift matrix has a non-negative eigenvalue real part");
    }

    // T Y + Y T^T = C with C = -U^T D U
    const MatrixXd c = -u.transpose() * d_diss * u;
    MatrixXd y = MatrixXd::Zero(n, n);
    for (int bj = nb - 1; bj >= 0; --bj) {
        for (int bi = nb - 1; bi >= bj; --bi) {
            const Eigen::Index i0 = start[bi], j0 = start[bj];
            const Eigen::Index ni = bsize(bi), nj = bsize(bj);
            MatrixXd rhs = c.block(i0, j0, ni, nj);
            // (T Y)_ij contributions from blocks right of T_ii
            if (i0 + ni < n)
                rhs -= t.block(i0, i0 + ni, ni, n - i0 - ni) *
                       y.block(i0 + ni, j0, n - i0 - ni, nj);
            // (Y T^T)_ij contributions from columns right of j
            if (j0 + nj < n)
                rhs -= y.block(i0, j0 + nj, ni, n - j0 - nj) *
                       t.block(j0, j0 + nj, nj, n - j0 - nj).transpose();
            const MatrixXd yij = small_sylvester(t.block(i0, i0, ni, ni),
                                                 t.block(j0, j0, nj, nj), rhs);
            y.block(i0, j0, ni, nj) = yij;
            if (bi != bj) y.block(j0, i0, nj, ni) = yij.transpose();
        }
    }

    MatrixXd x = u * y * u.transpose();
    return 0.5 * (x + x.transpose());
}

}  // namespace bec
