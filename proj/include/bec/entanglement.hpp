#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bec/lattice.hpp"

namespace bec {

// Bipartition of the N lattice modes; indices are 0-based and sorted.
struct Bipartition {
    std::vector<int> part_a;
    int n_modes = 0;

    static Bipartition of(std::vector<int> a, int n_modes);
    static Bipartition zigzag(int n_modes);  // even indices in part A
    std::vector<int> part_b() const;
    std::string label() const;  // e.g. "A|B" mask string like "ABAB"
};

enum class WitnessKind { AnalyticThermal, AnalyticAdiabatic, SdpDual };

// Positive value certifies entanglement (value = 1 - nonnegative trace <= 1).
struct WitnessValue {
    double value;
    WitnessKind kind;
};

// Logarithmic negativity across the cut from the partially transposed
// covariance matrix (phi sign flip on part B). log2 by default.
double log_negativity(const CovarianceMatrix& gamma, const Bipartition& cut,
                      bool use_log2 = true);

// Product-spectrum path for (rho,phi)-block-diagonal Gamma:
// nu~_j^2 = eig_j(Y_rho P Y_phi P). Agrees with log_negativity to 1e-9 on
// such inputs; exposed separately so the two paths can be cross-checked.
double log_negativity_product_spectrum(const CovarianceMatrix& gamma,
                                       const Bipartition& cut,
                                       bool use_log2 = true);

enum class Quantifier { LogNeg, SdpWitness };

// Exhaustive over all 2^(N-1)-1 cuts for N <= 22, named-family heuristic
// (contiguous halves, zig-zag, single-site cuts) above. Ties break towards the
// lexicographically smallest part_a.
std::pair<Bipartition, double> best_bipartition(const CovarianceMatrix& gamma,
                                                Quantifier quantifier,
                                                bool require_exhaustive = false);

// W(T) = 1 - sqrt((w_1/w_N) coth(w_N/2T) coth(w_1/2T))
WitnessValue witness_thermal_analytic(const NormalModeBasis& basis,
                                      double temperature);

// W(t,T) = 1 - sqrt((w_1(t)/w_N(t)) coth(w_N(0)/2T) coth(w_1(0)/2T))
WitnessValue witness_adiabatic_analytic(const NormalModeBasis& basis0,
                                        const NormalModeBasis& basis_t,
                                        double temperature);

struct SeparableAnsatz {
    bool feasible;
    std::optional<double> a_star;
};

// Extremal-mode separability test for mode-diagonal moments: feasible iff
// alpha_1 * beta_N >= 1/(4 delta^2). alpha must be ascending, beta descending.
SeparableAnsatz separable_ansatz_feasible(const Eigen::VectorXd& alpha,
                                          const Eigen::VectorXd& beta,
                                          double delta);

// Best-separable-approximation lower bound: clip(value, 0, 1).
double bsa_lower_bound(const WitnessValue& witness);

enum class AsymptoticRegime { FixedSpacing, ContinuumFixedL, SmallL, LargeL };

double witness_asymptotics(const PhysicalParams& params, double temperature,
                           AsymptoticRegime regime);

}  // namespace bec
