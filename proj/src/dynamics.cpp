#include "bec/dynamics.hpp"

#include <cmath>

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double CompressionProtocol::epsilon() const {
    return std::pow(length_ratio_final, 1.0 / n_steps) - 1.0;
}

double CompressionProtocol::lambda_after(int n) const {
    return std::pow(1.0 + epsilon(), -static_cast<double>(n));
}

std::vector<std::string> CompressionProtocol::validate() const {
    if (length_ratio_final <= 0)
        throw NonPositiveInputError("length_ratio_final must be positive");
    if (total_time <= 0)
        throw NonPositiveInputError("total_time must be positive");
    if (n_steps < 1)
        throw NonPositiveInputError("n_steps must be >= 1");
    std::vector<std::string> warnings;
    if (std::abs(epsilon()) > 1e-2)
        warnings.push_back("per-step length change |eps| = " +
                           std::to_string(std::abs(epsilon())) +
                           " > 1e-2: increase n_steps");
    return warnings;
}

namespace {

QuadraticHamiltonian scaled_hamiltonian(const PhysicalParams& params,
                                        double lam) {
    const int n = params.n_pixels;
    QuadraticHamiltonian h;
    h.block_rho = params.coupling_g * lam * MatrixXd::Identity(n, n);
    h.block_phi =
        params.phi_prefactor() * lam * lam * build_laplacian(n, params.boundary) +
        params.zero_mode_mu * MatrixXd::Identity(n, n);
    h.cross_block = MatrixXd::Zero(n, n);
    h.pixel_size = params.pixel_size();  // initial spacing, fixed
    h.boundary = params.boundary;
    return h;
}

}  // namespace

QuadraticHamiltonian step_hamiltonian(const PhysicalParams& params,
                                      const CompressionProtocol& protocol,
                                      int n) {
    params.validate();
    protocol.validate();
    if (n < 0 || n >= protocol.n_steps)
        throw IndexOutOfRangeError("step index outside [0, n_steps)");
    return scaled_hamiltonian(params, protocol.lambda_after(n + 1));
}

CovarianceMatrix propagate_step(const CovarianceMatrix& gamma,
                                const QuadraticHamiltonian& h, double dt) {
    if (dt <= 0) throw NonPositiveInputError("dt must be positive");
    if (2 * h.n_sites() != gamma.entries().rows())
        throw DimensionMismatchError("propagate_step: size mismatch");
    if (!check_uncertainty(gamma, CovarianceMatrix::kDefaultTol *
                                      std::max(1.0, gamma.entries().cwiseAbs().maxCoeff())))
        throw UnphysicalInputError("propagate_step: input state unphysical");
    const SymplecticForm om = gamma.omega();
    const MatrixXd s = matrix_exponential(gamma.eta() * om.mul_left(h.full()), dt);
    MatrixXd out = s * gamma.entries() * s.transpose();
    return CovarianceMatrix::trusted(0.5 * (out + out.transpose()), gamma.eta());
}

namespace {

// rotate rows/cols (k, n+k) of the mode-basis covariance by the per-mode
// propagator exp([[0, beta], [-alpha, 0]]), in place
void apply_mode_rotation(MatrixXd& g, int n, int k, double alpha, double beta) {
    const double w = std::sqrt(alpha * beta);
    double c, sa, sb;
    if (w < 1e-8) {
        // series for sin(w)/w to keep the nilpotent (beta = 0) limit exact
        const double sinc = 1.0 - w * w / 6.0;
        c = 1.0 - w * w / 2.0 + w * w * w * w / 24.0;
        sa = -alpha * sinc;
        sb = beta * sinc;
    } else {
        c = std::cos(w);
        const double sinc = std::sin(w) / w;
        sa = -alpha * sinc;
        sb = beta * sinc;
    }
    // rows
    VectorXd r1 = c * g.row(k) + sb * g.row(n + k);
    VectorXd r2 = sa * g.row(k) + c * g.row(n + k);
    g.row(k) = r1;
    g.row(n + k) = r2;
    // columns
    VectorXd c1 = c * g.col(k) + sb * g.col(n + k);
    VectorXd c2 = sa * g.col(k) + c * g.col(n + k);
    g.col(k) = c1;
    g.col(n + k) = c2;
}

}  // namespace

std::vector<Snapshot> run_compression_segment(const CovarianceMatrix& gamma0,
                                              const PhysicalParams& params,
                                              const CompressionProtocol& protocol,
                                              double lambda_start,
                                              int snapshot_every) {
    params.validate();
    protocol.validate();
    const int n = params.n_pixels;
    if (2 * n != gamma0.entries().rows())
        throw DimensionMismatchError("run_compression: size mismatch");

    const NormalModeBasis basis = normal_modes(build_hamiltonian(params));
    const MatrixXd& o = basis.diagonalizer;
    const double eta = gamma0.eta();
    const double dt = protocol.dt();
    const double mu = params.zero_mode_mu;

    // to mode basis
    MatrixXd g(2 * n, 2 * n);
    {
        const MatrixXd& in = gamma0.entries();
        MatrixXd tmp(2 * n, 2 * n);
        tmp.topRows(n) = o.transpose() * in.topRows(n);
        tmp.bottomRows(n) = o.transpose() * in.bottomRows(n);
        g.leftCols(n) = tmp.leftCols(n) * o;
        g.rightCols(n) = tmp.rightCols(n) * o;
    }

    auto emit = [&](std::vector<Snapshot>& snaps, int step, double lam) {
        MatrixXd tmp(2 * n, 2 * n), out(2 * n, 2 * n);
        tmp.topRows(n) = o * g.topRows(n);
        tmp.bottomRows(n) = o * g.bottomRows(n);
        out.leftCols(n) = tmp.leftCols(n) * o.transpose();
        out.rightCols(n) = tmp.rightCols(n) * o.transpose();
        snaps.push_back(Snapshot{step * dt, lam,
                                 CovarianceMatrix::trusted(
                                     0.5 * (out + out.transpose()), eta)});
    };

    std::vector<Snapshot> snaps;
    emit(snaps, 0, lambda_start);
    double lam = lambda_start;
    for (int j = 0; j < protocol.n_steps; ++j) {
        lam = lambda_start * protocol.lambda_after(j + 1);
        const double a = params.coupling_g * lam;
        for (int k = 0; k < n; ++k) {
            // nu_k(lambda) rebuilt from the lambda = 1 spectrum
            const double bk =
                lam * lam * (basis.laplacian_eigs(k) - mu) + mu;
            apply_mode_rotation(g, n, k, eta * a * dt, eta * bk * dt);
        }
        const bool last = (j + 1 == protocol.n_steps);
        if (last || (snapshot_every > 0 && (j + 1) % snapshot_every == 0))
            emit(snaps, j + 1, lam);
    }
    return snaps;
}

CovarianceMatrix to_frame(const CovarianceMatrix& gamma, FrameTag from,
                          FrameTag to, const NormalModeBasis& basis) {
    const int n = gamma.n_modes();
    if (std::abs(from.lambda_now - to.lambda_now) >
        1e-12 * std::max(1.0, std::abs(from.lambda_now)))
        throw FrameMismatchError("frame change requires matching lambda");
    if (basis.diagonalizer.rows() != n)
        throw FrameMismatchError("basis size mismatch");
    if (from.frame == to.frame)
        return gamma;

    const double lam = from.lambda_now;
    const MatrixXd& o = basis.diagonalizer;
    MatrixXd g = gamma.entries();

    auto scale_rho = [&](MatrixXd& m, double f) {
        m.topRows(n) *= f;
        m.leftCols(n) *= f;
    };
    auto congruence = [&](MatrixXd& m, const MatrixXd& q) {
        // m -> (q ⊕ q) m (q ⊕ q)^T
        MatrixXd tmp(2 * n, 2 * n);
        tmp.topRows(n) = q * m.topRows(n);
        tmp.bottomRows(n) = q * m.bottomRows(n);
        m.leftCols(n) = (tmp.leftCols(n) * q.transpose()).eval();
        m.rightCols(n) = (tmp.rightCols(n) * q.transpose()).eval();
    };

    // go via the co-compressing lattice frame
    switch (from.frame) {
        case Frame::Lattice:
            scale_rho(g, 1.0 / lam);  // Y = R X, R = (lambda^{-1} I) ⊕ I
            break;
        case Frame::InstantaneousModes:
            congruence(g, o);  // back from mode coordinates
            break;
        case Frame::CoCompressing:
            break;
    }
    switch (to.frame) {
        case Frame::Lattice:
            scale_rho(g, lam);
            break;
        case Frame::InstantaneousModes: {
            MatrixXd ot = o.transpose();
            congruence(g, ot);
            break;
        }
        case Frame::CoCompressing:
            break;
    }
    return CovarianceMatrix::trusted(0.5 * (g + g.transpose()), gamma.eta());
}

CovarianceMatrix adiabatic_reference(const PhysicalParams& params,
                                     const NormalModeBasis& basis0,
                                     double temperature, double lambda) {
    params.validate();
    if (temperature <= 0)
        throw NonPositiveTemperatureError("temperature must be positive");
    if (lambda <= 0) throw NonPositiveInputError("lambda must be positive");
    const int n = params.n_pixels;
    const double delta = params.pixel_size();
    const double g_eff = params.coupling_g * lambda;
    const double mu = params.zero_mode_mu;

    VectorXd alpha(n), beta(n);
    for (int k = 0; k < n; ++k) {
        const double w0 = basis0.frequencies(k);
        if (w0 <= 0.0) throw ZeroModeError("zero mode in initial spectrum");
        const double nu_l = lambda * lambda * (basis0.laplacian_eigs(k) - mu) + mu;
        const double w = std::sqrt(g_eff * nu_l);
        if (w <= 0.0) throw ZeroModeError("zero mode at compressed spectrum");
        const double c = coth(w0 / (2.0 * temperature));
        alpha(k) = w / (2.0 * g_eff * delta) * c;
        beta(k) = g_eff / (2.0 * w * delta) * c;
    }
    const MatrixXd& o = basis0.diagonalizer;
    MatrixXd gamma = MatrixXd::Zero(2 * n, 2 * n);
    gamma.topLeftCorner(n, n) = o * (2.0 * alpha).asDiagonal() * o.transpose();
    gamma.bottomRightCorner(n, n) = o * (2.0 * beta).asDiagonal() * o.transpose();
    return CovarianceMatrix::trusted(0.5 * (gamma + gamma.transpose()).eval(),
                                     1.0 / delta);
}

ModeStructure mode_basis_structure(const CovarianceMatrix& gamma,
                                   const NormalModeBasis& basis) {
    const int n = gamma.n_modes();
    const CovarianceMatrix gm = to_frame(gamma, FrameTag{Frame::CoCompressing, 1.0},
                                         FrameTag{Frame::InstantaneousModes, 1.0},
                                         basis);
    const MatrixXd& m = gm.entries();
    ModeStructure st;
    st.a.resize(n);
    st.b.resize(n);
    st.c.resize(n);
    double resid = 0.0;
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
            const int mi = i % n, mj = j % n;
            if (mi == mj) continue;
            resid = std::max(resid, std::abs(m(i, j)));
        }
    for (int k = 0; k < n; ++k) {
        st.a(k) = m(k, k);
        st.b(k) = m(n + k, n + k);
        st.c(k) = 0.5 * (m(k, n + k) + m(n + k, k));
    }
    st.residual = resid;
    return st;
}

}  // namespace bec
