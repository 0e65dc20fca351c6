#include "bec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::string> PhysicalParams::validate() const {
    if (mass <= 0) throw NonPositiveInputError("mass must be positive");
    if (coupling_g <= 0) throw NonPositiveInputError("coupling_g must be positive");
    if (mean_density <= 0) throw NonPositiveInputError("mean_density must be positive");
    if (box_length <= 0) throw NonPositiveInputError("box_length must be positive");
    if (n_pixels < 1) throw NonPositiveInputError("n_pixels must be >= 1");
    if (zero_mode_mu < 0) throw NonPositiveInputError("zero_mode_mu must be >= 0");
    std::vector<std::string> warnings;
    if (lieb_liniger_gamma() > 1.0)
        warnings.push_back("interaction parameter m*g/density = " +
                           std::to_string(lieb_liniger_gamma()) +
                           " > 1: outside the weakly interacting regime");
    return warnings;
}

MatrixXd QuadraticHamiltonian::full() const {
    const int n = n_sites();
    MatrixXd h = MatrixXd::Zero(2 * n, 2 * n);
    h.topLeftCorner(n, n) = block_rho;
    h.bottomRightCorner(n, n) = block_phi;
    h.topRightCorner(n, n) = cross_block;
    h.bottomLeftCorner(n, n) = cross_block.transpose();
    return h;
}

MatrixXd build_laplacian(int n_pixels, Boundary boundary) {
    if (n_pixels < 1) throw NonPositiveInputError("n_pixels must be >= 1");
    const int n = n_pixels;
    MatrixXd l = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        l(i, i) = 2.0;
        if (i > 0) l(i, i - 1) = -1.0;
        if (i + 1 < n) l(i, i + 1) = -1.0;
    }
    if (boundary == Boundary::Neumann) {
        l(0, 0) = 1.0;
        l(n - 1, n - 1) = 1.0;
    }
    return l;
}

QuadraticHamiltonian build_hamiltonian(const PhysicalParams& params) {
    params.validate();
    const int n = params.n_pixels;
    QuadraticHamiltonian h;
    h.block_rho = params.coupling_g * MatrixXd::Identity(n, n);
    h.block_phi = params.phi_prefactor() * build_laplacian(n, params.boundary) +
                  params.zero_mode_mu * MatrixXd::Identity(n, n);
    h.cross_block = MatrixXd::Zero(n, n);
    h.pixel_size = params.pixel_size();
    h.boundary = params.boundary;
    return h;
}

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd closed_form_diagonalizer(int n, Boundary boundary) {
    MatrixXd o(n, n);
    if (boundary == Boundary::Neumann) {
        // cosine transform, uniform zero mode in the first column
        for (int k = 0; k < n; ++k) {
            const double norm = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
            for (int j = 0; j < n; ++j)
                o(j, k) = norm * std::cos(kPi * k * (j + 0.5) / n);
        }
    } else {
        // sine transform
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                o(j, k) = std::sqrt(2.0 / (n + 1)) *
                          std::sin(kPi * (j + 1) * (k + 1) / (n + 1));
    }
    return o;
}

// scalar g from block_rho = g * I; rejects anything else
double identity_coefficient(const MatrixXd& block_rho) {
    const int n = static_cast<int>(block_rho.rows());
    const double g = block_rho.trace() / n;
    const double resid =
        (block_rho - g * MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (resid > 1e-10 * std::max(1.0, std::abs(g)))
        throw UnphysicalInputError(
            "density block must be proportional to the identity");
    return g;
}

}  // namespace

NormalModeBasis normal_modes(const QuadraticHamiltonian& h) {
    const int n = h.n_sites();
    const MatrixXd& hphi = h.block_phi;
    const double scale = std::max(1e-300, hphi.cwiseAbs().maxCoeff());
    if ((hphi - hphi.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetricError("normal_modes: phi block not symmetric");

    MatrixXd o;
    VectorXd nu;
    bool ok = false;
    if (h.boundary) {
        o = closed_form_diagonalizer(n, *h.boundary);
        const MatrixXd m = o.transpose() * hphi * o;
        nu = m.diagonal();
        MatrixXd off = m;
        off.diagonal().setZero();
        ok = off.cwiseAbs().maxCoeff() <= 1e-10 * scale;
    }
    if (!ok) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(hphi);
        o = es.eigenvectors();
        nu = es.eigenvalues();
    }

    // sort ascending in nu, stable in the original column index
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return nu(a) < nu(b); });

    NormalModeBasis basis;
    basis.diagonalizer.resize(n, n);
    basis.laplacian_eigs.resize(n);
    basis.frequencies.resize(n);
    const double g = identity_coefficient(h.block_rho);
    for (int k = 0; k < n; ++k) {
        basis.diagonalizer.col(k) = o.col(idx[k]);
        basis.laplacian_eigs(k) = nu(idx[k]);
        const double w2 = g * nu(idx[k]);
        basis.frequencies(k) = w2 <= 0.0 ? 0.0 : std::sqrt(w2);
    }
    return basis;
}

std::pair<VectorXd, VectorXd> thermal_mode_moments(
    const QuadraticHamiltonian& h, const NormalModeBasis& basis,
    double temperature) {
    if (temperature <= 0)
        throw NonPositiveTemperatureError("temperature must be positive");
    const int n = h.n_sites();
    const double g = identity_coefficient(h.block_rho);
    const double delta = h.pixel_size;
    VectorXd alpha(n), beta(n);
    for (int k = 0; k < n; ++k) {
        const double w = basis.frequencies(k);
        if (w <= 0.0 || basis.laplacian_eigs(k) <= 0.0)
            throw ZeroModeError("zero mode present: regularize before building thermal states");
        const double c = coth(w / (2.0 * temperature));
        alpha(k) = w / (2.0 * g * delta) * c;
        beta(k) = g / (2.0 * w * delta) * c;
    }
    return {alpha, beta};
}

CovarianceMatrix thermal_covariance(const QuadraticHamiltonian& h,
                                    const NormalModeBasis& basis,
                                    double temperature) {
    const int n = h.n_sites();
    auto [alpha, beta] = thermal_mode_moments(h, basis, temperature);
    const MatrixXd& o = basis.diagonalizer;
    MatrixXd gamma = MatrixXd::Zero(2 * n, 2 * n);
    gamma.topLeftCorner(n, n) = o * (2.0 * alpha).asDiagonal() * o.transpose();
    gamma.bottomRightCorner(n, n) = o * (2.0 * beta).asDiagonal() * o.transpose();
    gamma.topLeftCorner(n, n) =
        0.5 * (gamma.topLeftCorner(n, n) + gamma.topLeftCorner(n, n).transpose()).eval();
    gamma.bottomRightCorner(n, n) =
        0.5 * (gamma.bottomRightCorner(n, n) + gamma.bottomRightCorner(n, n).transpose()).eval();
    return CovarianceMatrix::trusted(std::move(gamma), 1.0 / h.pixel_size);
}

double healing_length(const PhysicalParams& params) {
    params.validate();
    return 1.0 / std::sqrt(params.mass * params.coupling_g * params.mean_density);
}

double bogoliubov_dispersion(const PhysicalParams& params, double k) {
    params.validate();
    const double kin = k * k / (2.0 * params.mass);
    return std::sqrt(kin * (kin + 2.0 * params.coupling_g * params.mean_density));
}

ConvertedScenario convert_units(double mass_kg, double g_si,
                                double density_per_m, double length_m,
                                double temperature_nK, int n_pixels,
                                Boundary boundary, double mu_relative) {
    if (mass_kg <= 0 || g_si <= 0 || density_per_m <= 0 || length_m <= 0)
        throw NonPositiveInputError("convert_units: inputs must be positive");
    if (temperature_nK < 0)
        throw NonPositiveInputError("convert_units: temperature must be >= 0");
    if (n_pixels < 1)
        throw NonPositiveInputError("convert_units: n_pixels must be >= 1");

    ConvertedScenario out;
    out.units.mass_kg = mass_kg;
    out.params.mass = 1.0;
    out.params.coupling_g = out.units.coupling_from_si(g_si);
    out.params.mean_density = out.units.density_from_per_m(density_per_m);
    out.params.box_length = out.units.length_from_m(length_m);
    out.params.n_pixels = n_pixels;
    out.params.boundary = boundary;
    out.params.zero_mode_mu = mu_relative * out.params.phi_prefactor();
    out.temperature = out.units.temperature_from_nK(temperature_nK);
    return out;
}

}  // namespace bec
