#pragma once

#include <vector>

#include "bec/lattice.hpp"

namespace bec {

// Geometric box-length schedule L_{n+1} = (1+eps) L_n over n_steps steps,
// ending at L_final = length_ratio_final * L_0. lambda(t) = L_0/L(t), so
// lambda_n = (1+eps)^{-n} with eps = length_ratio_final^{1/n_steps} - 1.
struct CompressionProtocol {
    double length_ratio_final = 1.0;  // L_final / L_0
    double total_time = 1.0;
    int n_steps = 1;

    double epsilon() const;
    double dt() const { return total_time / n_steps; }
    double lambda_after(int n) const;  // lambda_n, n in [0, n_steps]
    std::vector<std::string> validate() const;
};

enum class Frame { Lattice, CoCompressing, InstantaneousModes };

struct FrameTag {
    Frame frame = Frame::Lattice;
    double lambda_now = 1.0;
};

// Piecewise-constant Hamiltonian for step n (0-based). During step n the box
// moves from lambda_n to lambda_{n+1}; the generator uses the endpoint value,
// so the density block is g*lambda_{n+1}*I and the phase block scales with
// lambda_{n+1}^2. pixel_size stays at the initial spacing (co-compressing
// frame).
QuadraticHamiltonian step_hamiltonian(const PhysicalParams& params,
                                      const CompressionProtocol& protocol,
                                      int n);

// Gamma -> S Gamma S^T with S = exp(eta * Omega * H * dt).
CovarianceMatrix propagate_step(const CovarianceMatrix& gamma,
                                const QuadraticHamiltonian& h, double dt);

struct Snapshot {
    double time;
    double lambda;
    CovarianceMatrix gamma;  // co-compressing frame
};

// Trotterized compression starting from lambda_start (1 for a fresh run).
// snapshot_every <= 0 keeps endpoints only. The state stays in the
// co-compressing frame; internally the evolution runs in the fixed normal-mode
// basis where every step propagator is a per-mode rotation.
std::vector<Snapshot> run_compression_segment(const CovarianceMatrix& gamma0,
                                              const PhysicalParams& params,
                                              const CompressionProtocol& protocol,
                                              double lambda_start,
                                              int snapshot_every);

inline std::vector<Snapshot> run_compression(const CovarianceMatrix& gamma0,
                                             const PhysicalParams& params,
                                             const CompressionProtocol& protocol,
                                             int snapshot_every = 1) {
    return run_compression_segment(gamma0, params, protocol, 1.0, snapshot_every);
}

// Frame changes: Lattice <-> CoCompressing via the local squeezing
// R(lambda) = (lambda^{-1} I) ⊕ I, CoCompressing <-> InstantaneousModes via
// O ⊕ O. Both tags must carry the same lambda.
CovarianceMatrix to_frame(const CovarianceMatrix& gamma, FrameTag from,
                          FrameTag to, const NormalModeBasis& basis);

// Fully adiabatic reference state at compression lambda: mode occupations
// frozen at their initial thermal values, second moments taken from the
// instantaneous Hamiltonian (coupling g*lambda, frequencies omega_k(lambda)).
// Returned in the co-compressing lattice basis.
CovarianceMatrix adiabatic_reference(const PhysicalParams& params,
                                     const NormalModeBasis& basis0,
                                     double temperature, double lambda);

// Per-mode 2x2 decomposition of Gamma in a mode basis: a_k = <rho_k^2> pair,
// b_k = <phi_k^2> pair, c_k = symmetrized cross term; residual is the largest
// entry outside that pattern.
struct ModeStructure {
    Eigen::VectorXd a, b, c;
    double residual;
};

ModeStructure mode_basis_structure(const CovarianceMatrix& gamma,
                                   const NormalModeBasis& basis);

}  // namespace bec
