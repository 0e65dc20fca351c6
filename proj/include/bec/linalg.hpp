#pragma once

#include <Eigen/Dense>
#include <optional>

#include "bec/types.hpp"

namespace bec {

// Rescaled symplectic form Omega = [[0, I], [-I, 0]] on 2*n_modes quadratures.
// Global quadrature ordering throughout the library: (rho_1..rho_N, phi_1..phi_N).
// The rescale factor eta (= 1/pixel size) is carried alongside the +-1 matrix;
// it enters only through thresholds (physicality nu >= eta) and generators.
struct SymplecticForm {
    int n_modes;
    double eta;

    Eigen::MatrixXd matrix() const;
    // Omega * m, without materializing Omega.
    Eigen::MatrixXd mul_left(const Eigen::MatrixXd& m) const;
};

// Second-moment matrix Gamma_ij = <{dX_i, dX_j}> of a zero-mean Gaussian state.
// With this (unsymmetrized anticommutator, no 1/2) convention the uncertainty
// relation reads Gamma + i*eta*Omega >= 0, i.e. every symplectic eigenvalue is
// at least eta, and a single thermal mode has symplectic eigenvalue
// eta*coth(omega/2T).
class CovarianceMatrix {
  public:
    static constexpr double kDefaultTol = 1e-9;

    // Checks symmetry always; checks physicality (min symplectic eigenvalue
    // >= eta - physicality_tol * max-norm) unless physicality_tol < 0.
    CovarianceMatrix(Eigen::MatrixXd entries, double eta,
                     double physicality_tol = kDefaultTol);

    // Skips the O(N^3) physicality check. For internal constructions whose
    // physicality is guaranteed analytically (thermal states, symplectic
    // images of physical states).
    static CovarianceMatrix trusted(Eigen::MatrixXd entries, double eta);

    int n_modes() const { return n_modes_; }
    double eta() const { return eta_; }
    const Eigen::MatrixXd& entries() const { return entries_; }
    SymplecticForm omega() const { return SymplecticForm{n_modes_, eta_}; }

  private:
    CovarianceMatrix() = default;
    int n_modes_ = 0;
    double eta_ = 1.0;
    Eigen::MatrixXd entries_;
};

struct SymplecticEigen {
    Eigen::VectorXd values;  // ascending, length n_modes
    // S with S Omega S^T = Omega and Gamma = S (diag(v) ⊕ diag(v)) S^T,
    // computed on request.
    std::optional<Eigen::MatrixXd> transform;
};

// Positive moduli of the eigenvalues of i*Omega*Gamma, computed through the
// symmetric problem K = Gamma^{1/2} Omega Gamma^{1/2} (K K^T has each nu^2
// twice; pairs matched to 1e-9 relative).
SymplecticEigen symplectic_eigenvalues(const CovarianceMatrix& gamma,
                                       bool with_transform = false);

// true iff min symplectic eigenvalue >= eta - tol (Gamma + i*eta*Omega >= 0).
bool check_uncertainty(const CovarianceMatrix& gamma, double tol);

// [[A, -B], [B, A]]; PSD iff A + iB is PSD Hermitian.
Eigen::MatrixXd hermitian_psd_embed(const Eigen::MatrixXd& real_part,
                                    const Eigen::MatrixXd& imag_part);

// exp(a*t) by scaling-and-squaring with Pade approximants (degree chosen from
// the 1-norm, 13 at the top end).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t);

// Steady state of dGamma/dt = G Gamma + Gamma G^T + D: solves
// G X + X G^T + D = 0 by real-Schur (Bartels-Stewart) reduction.
// Throws NotHurwitz when G has an eigenvalue with non-negative real part.
Eigen::MatrixXd solve_lyapunov_steady(const Eigen::MatrixXd& g_drift,
                                      const Eigen::MatrixXd& d_diss);

// Numerically stable coth, exact to machine precision for both tiny and huge
// arguments.
double coth(double x);

}  // namespace bec
