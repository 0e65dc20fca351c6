#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bec/dynamics.hpp"

namespace bec {

struct BathSpec {
    double temperature = 0.0;     // internal units
    double coupling_gamma = 0.0;  // rate, 1/time
};

// Drift and diffusion matrices of dGamma/dt = G Gamma + Gamma G^T + D for a
// uniform local coupling to a thermal bath: G = Omega H / Delta - (gamma/2) I,
// D = gamma * Gamma_thermal(H, T_bath). G is Hurwitz by construction.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_drift_dissipation(
    const QuadraticHamiltonian& h, const NormalModeBasis& basis,
    const BathSpec& bath);

// Closed-form affine propagation around the Lyapunov fixed point:
// Gamma(t+d) = e^{Gd}(Gamma(t) - Gamma_inf)e^{G^T d} + Gamma_inf.
// Snapshots at every substep boundary (n_substeps+1 entries, lambda left at 1).
std::vector<Snapshot> thermalize(const CovarianceMatrix& gamma0,
                                 const Eigen::MatrixXd& g_drift,
                                 const Eigen::MatrixXd& d_diffusion,
                                 double duration, int n_substeps);

// <H> for the zero-mean Gaussian state Gamma.
double mean_energy(const CovarianceMatrix& gamma, const QuadraticHamiltonian& h);

struct OttoCycleSpec {
    CompressionProtocol compression;
    BathSpec hot_bath;
    CompressionProtocol expansion;  // reciprocal ratio, closes the cycle
    BathSpec cold_bath;
    double bath_stroke_time = 0.0;
    int bath_substeps = 1;
    int snapshot_every = 1;
    int entanglement_every = 0;  // evaluate witness/negativity every k-th
                                 // snapshot; 0 disables

    std::vector<std::string> validate() const;
};

struct EnergyLedger {
    struct Stroke {
        std::string name;
        bool unitary;    // work stroke if true, heat stroke otherwise
        double delta_e;  // E_end - E_start, Hamiltonian switches included
    };
    std::vector<Stroke> strokes;

    double total_delta_e() const;
    double total_work() const;
    double total_heat() const;
    // |dE_cycle - (W + Q)|; structurally tiny, kept as a surfaced diagnostic
    double first_law_residual() const;
};

struct StrokeTrace {
    std::string name;
    bool unitary;
    std::vector<Snapshot> snapshots;  // absolute times, co-compressing frame
};

struct EntanglementSample {
    double time;
    double witness_value;  // full-partition SDP witness
    double x_e;
    double log_neg_zigzag;
};

struct OttoResult {
    std::vector<StrokeTrace> strokes;
    EnergyLedger ledger;
    std::vector<EntanglementSample> entanglement;
    CovarianceMatrix final_state;
};

// One four-stroke cycle from the thermal state at initial_T: unitary
// compression, hot bath at fixed H_comp, unitary expansion, cold bath at H_0.
OttoResult run_otto_cycle(const PhysicalParams& params, const OttoCycleSpec& spec,
                          double initial_T);

}  // namespace bec
