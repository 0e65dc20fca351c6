#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bec/linalg.hpp"
#include "bec/units.hpp"

namespace bec {

enum class Boundary { Neumann, Dirichlet };

// All quantities in internal natural units (hbar = k_B = 1, micron lengths,
// atomic mass unit), see units.hpp.
struct PhysicalParams {
    double mass = 1.0;
    double coupling_g = 0.0;
    double mean_density = 0.0;  // atoms per length
    double box_length = 0.0;
    int n_pixels = 1;
    double zero_mode_mu = 0.0;
    Boundary boundary = Boundary::Neumann;

    double pixel_size() const { return box_length / n_pixels; }
    double eta() const { return 1.0 / pixel_size(); }
    double lieb_liniger_gamma() const { return mass * coupling_g / mean_density; }
    // phi-block Laplacian prefactor rho_bar / (m Delta^2)
    double phi_prefactor() const {
        const double d = pixel_size();
        return mean_density / (mass * d * d);
    }
    // Throws NonPositiveInput on invalid fields; returns model-validity
    // warnings (never errors), e.g. when outside the weakly interacting regime.
    std::vector<std::string> validate() const;
};

// Quadratic Hamiltonian H = (Delta/2) X^T [H_rho ⊕ H_phi] X in the global
// quadrature ordering. cross_block is zero for every model in scope but kept
// so diagnostics can report deviations.
struct QuadraticHamiltonian {
    Eigen::MatrixXd block_rho;
    Eigen::MatrixXd block_phi;
    Eigen::MatrixXd cross_block;
    double pixel_size = 1.0;
    std::optional<Boundary> boundary;  // set when built from a standard model

    int n_sites() const { return static_cast<int>(block_rho.rows()); }
    Eigen::MatrixXd full() const;  // 2N x 2N block matrix
};

struct NormalModeBasis {
    Eigen::MatrixXd diagonalizer;   // orthogonal O, N x N, columns are modes
    Eigen::VectorXd frequencies;    // omega_k = sqrt(g nu_k), ascending
    Eigen::VectorXd laplacian_eigs; // nu_k, eigenvalues of block_phi, ascending
};

Eigen::MatrixXd build_laplacian(int n_pixels, Boundary boundary);
QuadraticHamiltonian build_hamiltonian(const PhysicalParams& params);

// Diagonalizes block_phi. Uses the closed-form cosine/sine transforms when the
// boundary tag is present (verified against a residual bound), dense
// eigendecomposition otherwise. Modes sorted by ascending nu_k.
NormalModeBasis normal_modes(const QuadraticHamiltonian& h);

// Per-mode second moments alpha_k = <rho_k^2>, beta_k = <phi_k^2> of the
// thermal state (the covariance matrix stores 2*alpha_k, 2*beta_k).
std::pair<Eigen::VectorXd, Eigen::VectorXd> thermal_mode_moments(
    const QuadraticHamiltonian& h, const NormalModeBasis& basis,
    double temperature);

// Thermal covariance matrix in the lattice basis, exactly (rho,phi)
// block-diagonal by construction.
CovarianceMatrix thermal_covariance(const QuadraticHamiltonian& h,
                                    const NormalModeBasis& basis,
                                    double temperature);

double healing_length(const PhysicalParams& params);
double bogoliubov_dispersion(const PhysicalParams& params, double k);

struct ConvertedScenario {
    PhysicalParams params;
    double temperature;  // dimensionless
    UnitSystem units;
};

// SI in (g_si in J*m), internal natural units out. Round-trips to 1e-12.
ConvertedScenario convert_units(double mass_kg, double g_si,
                                double density_per_m, double length_m,
                                double temperature_nK, int n_pixels,
                                Boundary boundary, double mu_relative);

}  // namespace bec
