#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bec/linalg.hpp"

namespace bec {

struct NormalModeBasis;

// Inequality-form semidefinite program
//   min  c^T x   s.t.   F(x) = F0 + sum_i x_i F_i >= 0   (per block)
// with sparse symmetric coefficient matrices.
struct SparseEntry {
    int row, col;   // row <= col; off-diagonal entries act symmetrically
    double value;
};

struct SdpProblem {
    Eigen::VectorXd objective;
    std::vector<Eigen::MatrixXd> f0;                            // per block
    std::vector<std::vector<std::vector<SparseEntry>>> coeffs;  // [block][var]
    std::optional<Eigen::VectorXd> feasible_x;  // strictly feasible start

    // Metadata attached by build_cmc_primal so solutions can be interpreted
    // without re-deriving the variable layout.
    struct CmcInfo {
        std::vector<std::vector<int>> groups;
        int n_modes;
        double eta_scaled;
        double scale;
    };
    std::optional<CmcInfo> cmc;

    int n_vars() const { return static_cast<int>(objective.size()); }
    int n_blocks() const { return static_cast<int>(f0.size()); }
    void validate() const;
    Eigen::MatrixXd assemble(int block, const Eigen::VectorXd& x) const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalTrouble };

struct SdpSolution {
    Eigen::VectorXd x;
    std::vector<Eigen::MatrixXd> z_blocks;  // dual PSD blocks
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;            // tr(F(x) Z), >= 0 up to feas_tol
    double dual_residual = 0.0;  // max_i |tr(F_i Z) - c_i|
    int iterations = 0;
    SdpStatus status = SdpStatus::NumericalTrouble;
    std::optional<SdpProblem::CmcInfo> cmc;
};

// Primal-dual interior-point solver (Nesterov-Todd scaling, Mehrotra
// predictor-corrector, dense Schur complement). Problems without a supplied
// strictly feasible point go through an auxiliary min-s phase first.
SdpSolution solve(const SdpProblem& problem, double gap_tol = 1e-8,
                  double feas_tol = 1e-8, int max_iter = 200);

// Disjoint groups of mode indices covering {0..N-1}; |groups| must exceed 1.
struct PartitionSpec {
    std::vector<std::vector<int>> groups;

    static PartitionSpec full(int n_modes);
    static PartitionSpec bipartition(const std::vector<int>& part_a, int n_modes);
    void validate(int n_modes) const;
};

// Optimal-witness problem: variables {x_e} ∪ {entries of local blocks
// gamma^(alpha)}, constraints Gamma - ⊕gamma^(alpha) >= 0 and
// ⊕gamma^(alpha) + (1+x_e) i eta Omega >= 0 (real embedding), objective
// min -x_e. Gamma is pre-scaled to unit max-norm for conditioning.
SdpProblem build_cmc_primal(const CovarianceMatrix& gamma,
                            const PartitionSpec& partition);

struct WitnessCertificate {
    double x_e;
    Eigen::MatrixXd z_real;                  // 2N x 2N PSD witness matrix
    double witness_value;                    // 1 - tr(z_real * Gamma_scaled)
    std::vector<Eigen::MatrixXd> local_blocks;  // recovered gamma^(alpha)
    SdpStatus status;
    double certificate_residual;
};

// Rebuilds and validates the dual certificate independently of solver
// internals: Z1 PSD, complex block PSD, exact normalization after rescaling,
// pinched-block equality. Throws CertificateInvalid when validation fails.
WitnessCertificate extract_witness(const SdpSolution& solution,
                                   const CovarianceMatrix& gamma);

// Per-mode contributions diag(S^T Z Gamma S); sums to tr(Z Gamma).
Eigen::VectorXd witness_mode_profile(const WitnessCertificate& cert,
                                     const NormalModeBasis& basis,
                                     const CovarianceMatrix& gamma);

// Convenience wrapper: build, solve, certify; returns the witness value.
WitnessCertificate cmc_witness(const CovarianceMatrix& gamma,
                               const PartitionSpec& partition,
                               double gap_tol = 1e-8, double feas_tol = 1e-8);

// Plain-text dump/load (dimension header + row-major entries) for
// cross-validation against external conic solvers.
void dump_problem(const SdpProblem& problem, const std::string& path);
SdpProblem load_problem(const std::string& path);

}  // namespace bec
