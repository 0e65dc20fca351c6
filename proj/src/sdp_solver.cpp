#include "bec/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lapack.hpp"

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SdpProblem::validate() const {
    const int t = n_vars();
    if (t < 1) throw Error("sdp: no variables");
    if (f0.empty()) throw Error("sdp: no constraint blocks");
    if (coeffs.size() != f0.size())
        throw DimensionMismatchError("sdp: block count mismatch");
    for (int b = 0; b < n_blocks(); ++b) {
        const auto dim = f0[b].rows();
        if (f0[b].cols() != dim)
            throw DimensionMismatchError("sdp: F0 not square");
        const double scale = std::max(1e-300, f0[b].cwiseAbs().maxCoeff());
        if ((f0[b] - f0[b].transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw NonSymmetricError("sdp: F0 not symmetric");
        if (static_cast<int>(coeffs[b].size()) != t)
            throw DimensionMismatchError("sdp: coefficient list size mismatch");
        for (const auto& entries : coeffs[b])
            for (const auto& e : entries)
                if (e.row < 0 || e.col < e.row || e.col >= dim)
                    throw DimensionMismatchError("sdp: coefficient entry out of range");
    }
    if (feasible_x && feasible_x->size() != t)
        throw DimensionMismatchError("sdp: feasible point size mismatch");
}

MatrixXd SdpProblem::assemble(int block, const VectorXd& x) const {
    MatrixXd s = f0[block];
    for (int i = 0; i < n_vars(); ++i) {
        const double xi = x(i);
        if (xi == 0.0) continue;
        for (const auto& e : coeffs[block][i]) {
            s(e.row, e.col) += xi * e.value;
            if (e.col != e.row) s(e.col, e.row) += xi * e.value;
        }
    }
    return s;
}

namespace {

// trace inner product of the sparse coefficient with a dense matrix
double tr_coeff(const std::vector<SparseEntry>& entries, const MatrixXd& m) {
    double t = 0.0;
    for (const auto& e : entries) {
        if (e.row == e.col)
            t += e.value * m(e.row, e.row);
        else
            t += e.value * (m(e.row, e.col) + m(e.col, e.row));
    }
    return t;
}

// both orientations of each off-diagonal entry, for Schur assembly
std::vector<SparseEntry> expand(const std::vector<SparseEntry>& entries) {
    std::vector<SparseEntry> out;
    out.reserve(2 * entries.size());
    for (const auto& e : entries) {
        out.push_back(e);
        if (e.row != e.col) out.push_back(SparseEntry{e.col, e.row, e.value});
    }
    return out;
}

// largest alpha in (0, 1] with m + alpha * dm strictly PSD-factorizable;
// 0 when even tiny steps fail
double max_step(const MatrixXd& m, const MatrixXd& dm) {
    auto ok = [&](double a) {
        MatrixXd trial = m + a * dm;
        return lapack::cholesky_lower(trial);
    };
    static const double grid[] = {1.0,  0.95, 0.8,  0.6,   0.4,   0.25,
                                  0.15, 0.08, 0.04, 0.02,  0.01,  4e-3,
                                  1e-3, 3e-4, 1e-4, 3e-5,  1e-5};
    double hi = 0.0, lo = 0.0;
    bool found = false;
    double prev = 1.0;
    for (double a : grid) {
        if (ok(a)) {
            lo = a;
            hi = prev;
            found = true;
            break;
        }
        prev = a;
    }
    if (!found) return 0.0;
    if (lo == 1.0) return 1.0;
    for (int it = 0; it < 2; ++it) {  // sharpen between last failure and success
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct CoreResult {
    SdpSolution sol;
    bool hit_stop_threshold = false;
};

// interior-point core; requires F(x0) strictly positive definite
CoreResult solve_core(const SdpProblem& p, const VectorXd& x0, double gap_tol,
                      double feas_tol, int max_iter,
                      std::optional<double> stop_obj_below) {
    const int t = p.n_vars();
    const int nb = p.n_blocks();
    const VectorXd& c = p.objective;
    const double cscale = std::max(1.0, c.cwiseAbs().maxCoeff());

    std::vector<std::vector<std::vector<SparseEntry>>> ex(nb);
    for (int b = 0; b < nb; ++b) {
        ex[b].resize(t);
        for (int i = 0; i < t; ++i) ex[b][i] = expand(p.coeffs[b][i]);
    }

    int ntot = 0;
    for (int b = 0; b < nb; ++b) ntot += static_cast<int>(p.f0[b].rows());

    VectorXd x = x0;
    std::vector<MatrixXd> s(nb), z(nb);
    for (int b = 0; b < nb; ++b) {
        s[b] = p.assemble(b, x);
        z[b] = MatrixXd::Identity(p.f0[b].rows(), p.f0[b].cols());
    }

    auto dual_resid = [&](VectorXd& rd) {
        for (int i = 0; i < t; ++i) {
            double v = -c(i);
            for (int b = 0; b < nb; ++b) v += tr_coeff(p.coeffs[b][i], z[b]);
            rd(i) = v;
        }
    };

    CoreResult res;
    SdpSolution& sol = res.sol;
    sol.status = SdpStatus::MaxIter;
    VectorXd rd(t);
    int stalls = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        dual_resid(rd);
        double gap = 0.0;
        for (int b = 0; b < nb; ++b)
            gap += (s[b].array() * z[b].array()).sum();
        const double mu = gap / ntot;
        const double pobj = c.dot(x);
        double dobj = 0.0;
        for (int b = 0; b < nb; ++b)
            dobj -= (p.f0[b].array() * z[b].array()).sum();

        sol.x = x;
        sol.z_blocks = z;
        sol.primal_obj = pobj;
        sol.dual_obj = dobj;
        sol.gap = gap;
        sol.dual_residual = rd.cwiseAbs().maxCoeff();
        sol.iterations = iter;

        // primal iterates stay strictly feasible, so once the objective drops
        // below the threshold the point is already usable; the auxiliary
        // problem may be unbounded, in which case full convergence never comes
        if (stop_obj_below && pobj < *stop_obj_below) {
            res.hit_stop_threshold = true;
            sol.status = SdpStatus::Optimal;
            return res;
        }
        if (gap <= gap_tol * std::max(1.0, std::abs(pobj)) &&
            sol.dual_residual <= feas_tol * cscale) {
            sol.status = SdpStatus::Optimal;
            return res;
        }

        // Nesterov-Todd scaling per block
        std::vector<MatrixXd> rmat(nb), rinv(nb), winv(nb);
        std::vector<VectorXd> sig(nb);
        bool scale_ok = true;
        for (int b = 0; b < nb; ++b) {
            MatrixXd ls = s[b];
            MatrixXd lz = z[b];
            if (!lapack::cholesky_lower(ls) || !lapack::cholesky_lower(lz)) {
                scale_ok = false;
                break;
            }
            MatrixXd u, vt;
            VectorXd sv;
            lapack::svd(lz.transpose() * ls, u, sv, vt);
            sig[b] = sv;
            const VectorXd shalf = sv.cwiseSqrt();
            // R = Ls V S^{-1/2}, R^{-1} = S^{1/2} V^T Ls^{-1}
            rmat[b] = ls * vt.transpose() * shalf.cwiseInverse().asDiagonal();
            MatrixXd vls = vt;  // will become V^T Ls^{-1}
            ls.triangularView<Eigen::Lower>().solveInPlace<Eigen::OnTheRight>(vls);
            rinv[b] = shalf.asDiagonal() * vls;
            winv[b] = rinv[b].transpose() * rinv[b];
        }
        if (!scale_ok) {
            sol.status = SdpStatus::NumericalTrouble;
            return res;
        }

        // Schur complement
        MatrixXd m = MatrixXd::Zero(t, t);
        for (int b = 0; b < nb; ++b) {
            const MatrixXd& w = winv[b];
            for (int i = 0; i < t; ++i) {
                if (ex[b][i].empty()) continue;
                for (int j = i; j < t; ++j) {
                    if (ex[b][j].empty()) continue;
                    double acc = 0.0;
                    for (const auto& e : ex[b][i])
                        for (const auto& f : ex[b][j])
                            acc += e.value * f.value * w(e.col, f.row) * w(f.col, e.row);
                    m(i, j) += acc;
                }
            }
        }
        m.triangularView<Eigen::StrictlyLower>() =
            m.triangularView<Eigen::StrictlyUpper>().transpose();

        Eigen::LLT<MatrixXd> mchol;
        double ridge = 0.0;
        for (int attempt = 0;; ++attempt) {
            MatrixXd mr = m;
            if (ridge > 0) mr.diagonal().array() += ridge;
            mchol.compute(mr);
            if (mchol.info() == Eigen::Success) break;
            if (attempt >= 3) {
                sol.status = SdpStatus::NumericalTrouble;
                return res;
            }
            ridge = (ridge == 0.0) ? 1e-13 * m.trace() / t : ridge * 100.0;
        }
        // predictor (affine scaling)
        const VectorXd dx_aff = mchol.solve(-c);
        std::vector<MatrixXd> ds_aff(nb), dz_aff(nb);
        for (int b = 0; b < nb; ++b) {
            MatrixXd ds = MatrixXd::Zero(p.f0[b].rows(), p.f0[b].cols());
            for (int i = 0; i < t; ++i) {
                const double v = dx_aff(i);
                if (v == 0.0) continue;
                for (const auto& e : ex[b][i]) ds(e.row, e.col) += v * e.value;
            }
            ds_aff[b] = ds;  // symmetric by construction (expanded entries)
            dz_aff[b] = -z[b] - winv[b] * ds * winv[b];
            dz_aff[b] = 0.5 * (dz_aff[b] + dz_aff[b].transpose()).eval();
        }
        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, max_step(s[b], ds_aff[b]));
            ad = std::min(ad, max_step(z[b], dz_aff[b]));
        }
        double gap_aff = 0.0;
        for (int b = 0; b < nb; ++b)
            gap_aff += ((s[b] + ap * ds_aff[b]).array() *
                        (z[b] + ad * dz_aff[b]).array())
                           .sum();
        const double mu_aff = std::max(0.0, gap_aff) / ntot;
        double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // corrector (combined step) in the scaled space
        VectorXd rhs = rd;
        std::vector<MatrixXd> bmat(nb);
        for (int b = 0; b < nb; ++b) {
            const MatrixXd dst = rinv[b] * ds_aff[b] * rinv[b].transpose();
            const MatrixXd dzt = rmat[b].transpose() * dz_aff[b] * rmat[b];
            const MatrixXd cross = dst * dzt;
            const VectorXd& sg = sig[b];
            const auto dim = p.f0[b].rows();
            MatrixXd v(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = 0; j < dim; ++j) {
                    double num = -(cross(i, j) + cross(j, i));
                    if (i == j) num += 2.0 * (sigma * mu - sg(i) * sg(i));
                    v(i, j) = num / (sg(i) + sg(j));
                }
            bmat[b] = rinv[b].transpose() * v * rinv[b];
            bmat[b] = 0.5 * (bmat[b] + bmat[b].transpose()).eval();
            for (int i = 0; i < t; ++i)
                rhs(i) += tr_coeff(p.coeffs[b][i], bmat[b]);
        }
        const VectorXd dx = mchol.solve(rhs);

        std::vector<MatrixXd> ds(nb), dz(nb);
        for (int b = 0; b < nb; ++b) {
            MatrixXd d = MatrixXd::Zero(p.f0[b].rows(), p.f0[b].cols());
            for (int i = 0; i < t; ++i) {
                const double v = dx(i);
                if (v == 0.0) continue;
                for (const auto& e : ex[b][i]) d(e.row, e.col) += v * e.value;
            }
            ds[b] = d;
            dz[b] = bmat[b] - winv[b] * d * winv[b];
            dz[b] = 0.5 * (dz[b] + dz[b].transpose()).eval();
        }
        double apc = 1.0, adc = 1.0;
        for (int b = 0; b < nb; ++b) {
            apc = std::min(apc, 0.98 * max_step(s[b], ds[b]));
            adc = std::min(adc, 0.98 * max_step(z[b], dz[b]));
        }
        apc = std::min(apc, 1.0);
        adc = std::min(adc, 1.0);

        if (apc < 1e-6 && adc < 1e-6) {
            if (++stalls >= 2) {
                sol.status = SdpStatus::NumericalTrouble;
                return res;
            }
        } else {
            stalls = 0;
        }

        x += apc * dx;
        for (int b = 0; b < nb; ++b) {
            s[b] = p.assemble(b, x);
            z[b] += adc * dz[b];
            z[b] = 0.5 * (z[b] + z[b].transpose()).eval();
        }
    }
    return res;
}

// smallest eigenvalue of F(x) per block, for feasibility margins
double min_eig_margin(const SdpProblem& p, const VectorXd& x) {
    double margin = std::numeric_limits<double>::infinity();
    for (int b = 0; b < p.n_blocks(); ++b) {
        VectorXd w;
        lapack::sym_eig(p.assemble(b, x), w);
        margin = std::min(margin, w.minCoeff());
    }
    return margin;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, double gap_tol, double feas_tol,
                  int max_iter) {
    problem.validate();
    const int t = problem.n_vars();

    VectorXd x0;
    bool have_start = false;
    if (problem.feasible_x) {
        x0 = *problem.feasible_x;
        have_start = min_eig_margin(problem, x0) > 0.0;
    }
    if (!have_start) {
        x0 = VectorXd::Zero(t);
        have_start = min_eig_margin(problem, x0) > 0.0;
    }

    if (!have_start) {
        // auxiliary problem: min s with F(x) + s I >= 0, strictly feasible at
        // x = 0 and s above the worst block eigenvalue
        SdpProblem aux;
        aux.objective = VectorXd::Zero(t + 1);
        aux.objective(t) = 1.0;
        aux.f0 = problem.f0;
        aux.coeffs.resize(problem.n_blocks());
        for (int b = 0; b < problem.n_blocks(); ++b) {
            aux.coeffs[b] = problem.coeffs[b];
            std::vector<SparseEntry> id;
            for (int i = 0; i < problem.f0[b].rows(); ++i)
                id.push_back(SparseEntry{i, i, 1.0});
            aux.coeffs[b].push_back(std::move(id));
        }
        const double margin0 = min_eig_margin(problem, VectorXd::Zero(t));
        VectorXd xa = VectorXd::Zero(t + 1);
        const double scale0 = std::max(1.0, -margin0);
        xa(t) = -margin0 + scale0;  // strictly inside
        const double target = -1e-2 * scale0;
        CoreResult aux_res =
            solve_core(aux, xa, 1e-6, 1e-6, max_iter, target);
        if (aux_res.sol.status != SdpStatus::Optimal ||
            aux_res.sol.x(t) >= 0.0) {
            SdpSolution out;
            out.status = SdpStatus::Infeasible;
            out.x = VectorXd::Zero(t);
            out.cmc = problem.cmc;
            return out;
        }
        x0 = aux_res.sol.x.head(t);
    }

    CoreResult res =
        solve_core(problem, x0, gap_tol, feas_tol, max_iter, std::nullopt);
    res.sol.cmc = problem.cmc;
    return res.sol;
}

}  // namespace bec
