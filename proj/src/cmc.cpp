#include <fstream>
#include <iomanip>

#include "bec/lattice.hpp"
#include "bec/sdp.hpp"

#include "lapack.hpp"

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

PartitionSpec PartitionSpec::full(int n_modes) {
    PartitionSpec p;
    for (int i = 0; i < n_modes; ++i) p.groups.push_back({i});
    p.validate(n_modes);
    return p;
}

PartitionSpec PartitionSpec::bipartition(const std::vector<int>& part_a,
                                         int n_modes) {
    PartitionSpec p;
    std::vector<bool> in_a(n_modes, false);
    for (int i : part_a) {
        if (i < 0 || i >= n_modes)
            throw InvalidPartitionError("mode index out of range");
        in_a[i] = true;
    }
    std::vector<int> a, b;
    for (int i = 0; i < n_modes; ++i) (in_a[i] ? a : b).push_back(i);
    p.groups = {a, b};
    p.validate(n_modes);
    return p;
}

void PartitionSpec::validate(int n_modes) const {
    if (groups.size() < 2)
        throw InvalidPartitionError("partition needs more than one group");
    std::vector<int> seen(n_modes, 0);
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidPartitionError("empty group");
        for (int i : g) {
            if (i < 0 || i >= n_modes)
                throw InvalidPartitionError("mode index out of range");
            if (seen[i]++) throw InvalidPartitionError("mode in two groups");
        }
    }
    for (int i = 0; i < n_modes; ++i)
        if (!seen[i]) throw InvalidPartitionError("mode missing from partition");
}

namespace {

// local coordinates of a group in the global (rho..., phi...) ordering
std::vector<int> group_coords(const std::vector<int>& modes, int n) {
    std::vector<int> c;
    c.reserve(2 * modes.size());
    for (int m : modes) c.push_back(m);
    for (int m : modes) c.push_back(n + m);
    return c;
}

}  // namespace

SdpProblem build_cmc_primal(const CovarianceMatrix& gamma,
                            const PartitionSpec& partition) {
    const int n = gamma.n_modes();
    partition.validate(n);

    const double scale = std::max(1e-300, gamma.entries().cwiseAbs().maxCoeff());
    const MatrixXd gs = gamma.entries() / scale;
    const double eta = gamma.eta() / scale;

    SdpProblem p;
    int t = 1;
    for (const auto& g : partition.groups) {
        const int d = 2 * static_cast<int>(g.size());
        t += d * (d + 1) / 2;
    }
    p.objective = VectorXd::Zero(t);
    p.objective(0) = -1.0;  // min -x_e

    // block 0: Gamma - ⊕gamma^(alpha) >= 0
    // block 1: embedding of ⊕gamma^(alpha) + (1+x_e) i eta Omega >= 0
    p.f0.resize(2);
    p.f0[0] = gs;
    MatrixXd f0e = MatrixXd::Zero(4 * n, 4 * n);
    p.coeffs.assign(2, std::vector<std::vector<SparseEntry>>(t));

    std::vector<SparseEntry> omega_entries;  // embedding of i eta Omega
    for (int k = 0; k < n; ++k) {
        omega_entries.push_back(SparseEntry{k, 3 * n + k, -eta});
        omega_entries.push_back(SparseEntry{n + k, 2 * n + k, eta});
    }
    for (const auto& e : omega_entries) {
        f0e(e.row, e.col) = e.value;
        f0e(e.col, e.row) = e.value;
    }
    p.f0[1] = f0e;
    p.coeffs[1][0] = omega_entries;  // x_e coefficient

    int var = 1;
    for (const auto& g : partition.groups) {
        const auto coords = group_coords(g, n);
        const int d = static_cast<int>(coords.size());
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                int r = coords[a], c = coords[b];
                if (r > c) std::swap(r, c);
                p.coeffs[0][var] = {SparseEntry{r, c, -1.0}};
                p.coeffs[1][var] = {SparseEntry{r, c, 1.0},
                                    SparseEntry{2 * n + r, 2 * n + c, 1.0}};
                ++var;
            }
    }

    // Slater point: gamma^(alpha) = s I with s strictly between the
    // constraints, x_e placed so the embedded block keeps a margin
    VectorXd w;
    lapack::sym_eig(gs, w);
    const double smargin = 0.5 * std::min(w.minCoeff(), eta);
    VectorXd x0 = VectorXd::Zero(t);
    x0(0) = smargin / (2.0 * eta) - 1.0;
    var = 1;
    for (const auto& g : partition.groups) {
        const int d = 2 * static_cast<int>(g.size());
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                if (a == b) x0(var) = smargin;
                ++var;
            }
    }
    p.feasible_x = x0;
    p.cmc = SdpProblem::CmcInfo{partition.groups, n, eta, scale};
    return p;
}

WitnessCertificate extract_witness(const SdpSolution& solution,
                                   const CovarianceMatrix& gamma) {
    if (!solution.cmc)
        throw CertificateInvalidError("solution does not carry witness metadata");
    if (solution.status != SdpStatus::Optimal &&
        solution.status != SdpStatus::MaxIter)
        throw CertificateInvalidError("no usable iterate");
    const auto& info = *solution.cmc;
    const int n = info.n_modes;
    if (gamma.n_modes() != n)
        throw DimensionMismatchError("extract_witness: size mismatch");
    if (solution.z_blocks.size() != 2)
        throw CertificateInvalidError("unexpected block structure");

    const double eta = info.eta_scaled;
    const MatrixXd gs = gamma.entries() / info.scale;
    const MatrixXd& z0 = solution.z_blocks[0];
    const MatrixXd& ze = solution.z_blocks[1];

    // normalization trace of the embedded dual block against i eta Omega
    double n0 = 0.0;
    for (int k = 0; k < n; ++k) {
        n0 += -eta * (ze(k, 3 * n + k) + ze(3 * n + k, k));
        n0 += eta * (ze(n + k, 2 * n + k) + ze(2 * n + k, n + k));
    }
    if (n0 >= -1e-6)
        throw CertificateInvalidError("dual normalization has the wrong sign");
    const double rescale = -1.0 / n0;

    const MatrixXd z1 = rescale * 0.5 * (z0 + z0.transpose());
    const MatrixXd pe = rescale * ze.topLeftCorner(2 * n, 2 * n);
    const MatrixXd re = rescale * ze.bottomRightCorner(2 * n, 2 * n);
    const MatrixXd qe = rescale * ze.bottomLeftCorner(2 * n, 2 * n);
    const MatrixXd z2_re = 0.5 * ((pe + re) + (pe + re).transpose());
    const MatrixXd z2_im = 0.5 * ((qe - qe.transpose()) -
                                  (qe - qe.transpose()).transpose());

    // independent validation: PSD of both dual pieces, pinched equality
    const double zscale = std::max(1.0, z1.cwiseAbs().maxCoeff());
    double resid = std::abs(n0 + 1.0);  // pre-rescale normalization residual
    {
        VectorXd w;
        lapack::sym_eig(z1, w);
        if (w.minCoeff() < -1e-6 * zscale)
            throw CertificateInvalidError("witness matrix not PSD");
        resid = std::max(resid, std::max(0.0, -w.minCoeff() / zscale));
        lapack::sym_eig(hermitian_psd_embed(z2_re, z2_im), w);
        if (w.minCoeff() < -1e-6 * zscale)
            throw CertificateInvalidError("embedded dual block not PSD");
        resid = std::max(resid, std::max(0.0, -w.minCoeff() / zscale));
    }
    double pinch = 0.0;
    for (const auto& g : info.groups) {
        const auto coords = group_coords(g, n);
        for (int a : coords)
            for (int b : coords)
                pinch = std::max(pinch, std::abs(z1(a, b) - z2_re(a, b)));
    }
    if (pinch > 1e-5 * zscale)
        throw CertificateInvalidError("pinched-block equality violated");
    resid = std::max(resid, pinch / zscale);

    WitnessCertificate cert;
    cert.x_e = solution.x(0);
    cert.z_real = z1 / info.scale;  // so that 1 - tr(z_real * Gamma) is the value
    cert.witness_value = 1.0 - (z1.array() * gs.array()).sum();
    cert.status = solution.status;
    cert.certificate_residual = resid;
    int var = 1;
    for (const auto& g : info.groups) {
        const int d = 2 * static_cast<int>(g.size());
        MatrixXd blk = MatrixXd::Zero(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                blk(a, b) = blk(b, a) = solution.x(var) * info.scale;
                ++var;
            }
        cert.local_blocks.push_back(std::move(blk));
    }
    return cert;
}

Eigen::VectorXd witness_mode_profile(const WitnessCertificate& cert,
                                     const NormalModeBasis& basis,
                                     const CovarianceMatrix& gamma) {
    const int n = gamma.n_modes();
    if (basis.diagonalizer.rows() != n || cert.z_real.rows() != 2 * n)
        throw DimensionMismatchError("witness_mode_profile: size mismatch");
    const MatrixXd& o = basis.diagonalizer;
    MatrixXd s = MatrixXd::Zero(2 * n, 2 * n);
    s.topLeftCorner(n, n) = o;
    s.bottomRightCorner(n, n) = o;
    const MatrixXd m = s.transpose() * cert.z_real * gamma.entries() * s;
    return m.diagonal();
}

WitnessCertificate cmc_witness(const CovarianceMatrix& gamma,
                               const PartitionSpec& partition, double gap_tol,
                               double feas_tol) {
    const SdpProblem p = build_cmc_primal(gamma, partition);
    SdpSolution sol = solve(p, gap_tol, feas_tol);
    // states with a nearly-free soft mode leave the interior point short of
    // the requested gap; back off to the attainable precision rather than
    // reporting a numerical failure, two decades at most
    for (double factor : {1e2, 1e4}) {
        if (sol.status != SdpStatus::NumericalTrouble) break;
        sol = solve(p, gap_tol * factor, feas_tol * factor);
    }
    return extract_witness(sol, gamma);
}

void dump_problem(const SdpProblem& problem, const std::string& path) {
    problem.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << std::setprecision(17);
    out << "SDP 1\n";
    out << problem.n_vars() << ' ' << problem.n_blocks() << '\n';
    for (const auto& f : problem.f0) out << f.rows() << ' ';
    out << '\n';
    for (int i = 0; i < problem.n_vars(); ++i)
        out << problem.objective(i) << ' ';
    out << '\n';
    for (int b = 0; b < problem.n_blocks(); ++b) {
        const auto& f = problem.f0[b];
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            for (Eigen::Index c = 0; c < f.cols(); ++c) out << f(r, c) << ' ';
            out << '\n';
        }
        for (int i = 0; i < problem.n_vars(); ++i) {
            out << problem.coeffs[b][i].size() << '\n';
            for (const auto& e : problem.coeffs[b][i])
                out << e.row << ' ' << e.col << ' ' << e.value << '\n';
        }
    }
}

SdpProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "SDP" || version != 1) throw Error("bad problem file header");
    int t = 0, nb = 0;
    in >> t >> nb;
    SdpProblem p;
    std::vector<int> dims(nb);
    for (int b = 0; b < nb; ++b) in >> dims[b];
    p.objective.resize(t);
    for (int i = 0; i < t; ++i) in >> p.objective(i);
    p.f0.resize(nb);
    p.coeffs.assign(nb, std::vector<std::vector<SparseEntry>>(t));
    for (int b = 0; b < nb; ++b) {
        p.f0[b].resize(dims[b], dims[b]);
        for (int r = 0; r < dims[b]; ++r)
            for (int c = 0; c < dims[b]; ++c) in >> p.f0[b](r, c);
        for (int i = 0; i < t; ++i) {
            size_t nnz = 0;
            in >> nnz;
            p.coeffs[b][i].resize(nnz);
            for (auto& e : p.coeffs[b][i]) in >> e.row >> e.col >> e.value;
        }
    }
    if (!in) throw Error("truncated problem file");
    p.validate();
    return p;
}

}  // namespace bec
