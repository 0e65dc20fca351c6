// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria. Run with a criterion
// number (1-9) or no argument for the full battery.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "bec/bath.hpp"
#include "bec/dynamics.hpp"
#include "bec/entanglement.hpp"
#include "bec/lattice.hpp"
#include "bec/sdp.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace bec;

namespace {

PhysicalParams unit_params(int n, Boundary bc, double mu = 0.0) {
    PhysicalParams p;
    p.mass = 1.0;
    p.coupling_g = 1.0;
    p.mean_density = 1.0;
    p.box_length = n;
    p.n_pixels = n;
    p.zero_mode_mu = mu;
    p.boundary = bc;
    return p;
}

// root of the analytic thermal witness in internal temperature units
double analytic_root(const NormalModeBasis& basis) {
    double lo = 1e-8, hi = 1.0;
    while (witness_thermal_analytic(basis, hi).value > 0) hi *= 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (witness_thermal_analytic(basis, mid).value > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Check {
    bool ok = true;
    std::vector<std::string> notes;
    void require(bool cond, const std::string& msg) {
        if (!cond) ok = false;
        notes.push_back(std::string(cond ? "ok:   " : "FAIL: ") + msg);
    }
    void note(const std::string& msg) { notes.push_back("      " + msg); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. critical temperature of the reference condensate

ConvertedScenario reference_model(Boundary bc, double xi_um) {
    const UnitSystem units;  // Rb-87, micron length scale
    const double rho_um = 6000.0 / 50.0;
    const double g_si = units.coupling_to_si(1.0 / (xi_um * xi_um * rho_um));
    const double mu_rel = bc == Boundary::Neumann ? 1e-6 : 0.0;
    return convert_units(units.mass_kg, g_si, rho_um * 1e6, 50e-6, 1.0, 400,
                         bc, mu_rel);
}

double t_star_nK(Boundary bc, double xi_um) {
    const auto model = reference_model(bc, xi_um);
    const auto basis = normal_modes(build_hamiltonian(model.params));
    return model.units.temperature_to_nK(analytic_root(basis));
}

Check criterion_1() {
    Check c;
    const double target = 3.7896;
    const double td = t_star_nK(Boundary::Dirichlet, 0.25);
    const double tn = t_star_nK(Boundary::Neumann, 0.25);
    c.note(fmt("analytic root: Dirichlet %.4f nK, Neumann(default reg) %.4f nK,"
               " target %.4f nK", td, tn, target));
    const bool within = std::abs(td - target) <= 0.05 * target ||
                        std::abs(tn - target) <= 0.05 * target;
    c.require(within, "analytic root within 5% of 3.7896 nK for some boundary");

    if (!within) {
        // best-fit report instead of silent tuning: which coupling would have
        // put the Dirichlet root on the published value?
        double lo = 0.01, hi = 50.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (t_star_nK(Boundary::Dirichlet, mid) > target ? lo : hi) = mid;
        }
        const double xi_fit = 0.5 * (lo + hi);
        const UnitSystem units;
        const double g_fit = units.coupling_to_si(1.0 / (xi_fit * xi_fit * 120.0));
        c.note(fmt("best fit: healing length %.4f um (stated 0.25 um),"
                   " g = %.4e J*m reproduces the published root", xi_fit, g_fit));
        c.note(fmt("discrepancy ratio %.3f (close to (2*pi)^2 = 39.48);"
                   " a coupling convention differing by (2*pi)^2 would explain it",
                   td / target));
    }

    // the artifact must at least agree with itself: SDP root within 1e-3 nK
    // of the analytic one, checked by a sign bracket at the full resolution
    const auto model = reference_model(Boundary::Dirichlet, 0.25);
    const auto h = build_hamiltonian(model.params);
    const auto basis = normal_modes(h);
    const double root_int = analytic_root(basis);
    const double root_nK = model.units.temperature_to_nK(root_int);
    const auto part = PartitionSpec::full(model.params.n_pixels);
    const double w_lo =
        cmc_witness(thermal_covariance(
                        h, basis,
                        model.units.temperature_from_nK(root_nK - 1e-3)),
                    part)
            .witness_value;
    const double w_hi =
        cmc_witness(thermal_covariance(
                        h, basis,
                        model.units.temperature_from_nK(root_nK + 1e-3)),
                    part)
            .witness_value;
    c.note(fmt("SDP witness at analytic root -/+ 1e-3 nK: %+.3e / %+.3e",
               w_lo, w_hi));
    c.require(w_lo > 0 && w_hi < 0,
              "SDP root brackets the analytic root within 1e-3 nK (N = 400)");
    return c;
}

// ---------------------------------------------------------------------------
// 2. SDP equals the closed-form witness on Dirichlet chains

Check criterion_2() {
    Check c;
    for (int n : {2, 4, 8, 16}) {
        const auto params = unit_params(n, Boundary::Dirichlet);
        const auto h = build_hamiltonian(params);
        const auto basis = normal_modes(h);
        const double tstar = analytic_root(basis);
        double worst = 0.0;
        for (int j = 1; j <= 10; ++j) {
            const double t = tstar * j / 11.0;
            const double wa = witness_thermal_analytic(basis, t).value;
            const double ws =
                cmc_witness(thermal_covariance(h, basis, t),
                            PartitionSpec::full(n))
                    .witness_value;
            worst = std::max(worst, std::abs(wa - ws));
        }
        c.require(worst <= 1e-6,
                  fmt("N = %2.0f: max |W_sdp - W_analytic| = %.2e <= 1e-6",
                      n, worst));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. witness root and log-negativity extinction coincide

Check criterion_3() {
    Check c;
    const UnitSystem units;
    const double rho_um = 120.0;
    const double g_si = units.coupling_to_si(1.0 / (0.25 * 0.25 * rho_um));
    const auto model = convert_units(units.mass_kg, g_si, rho_um * 1e6, 2e-6,
                                     1.0, 16, Boundary::Dirichlet, 0.0);
    const auto h = build_hamiltonian(model.params);
    const auto basis = normal_modes(h);
    const double root_nK = model.units.temperature_to_nK(analytic_root(basis));
    c.note(fmt("analytic witness root %.4f nK (16 pixels, 125 nm each)",
               root_nK));

    // 1e-3 nK scan through the root for both quantifiers
    const auto cut = Bipartition::zigzag(16);
    const double step = 1e-3;
    int last_neg = -1, last_wit = -1;
    const int span = 25;
    for (int i = -span; i <= span; ++i) {
        const double t_nK = root_nK + i * step;
        const double t = model.units.temperature_from_nK(t_nK);
        if (log_negativity(thermal_covariance(h, basis, t), cut) > 1e-12)
            last_neg = i;
        if (witness_thermal_analytic(basis, t).value > 0) last_wit = i;
    }
    c.require(last_neg > -span && last_neg < span,
              "negativity extinction falls inside the scan window");
    c.require(std::abs(last_neg - last_wit) <= 1,
              fmt("roots agree within one 1e-3 nK step (offset %1.0f steps)",
                  double(std::abs(last_neg - last_wit))));
    return c;
}

// ---------------------------------------------------------------------------
// 4. the alternating cut is optimal for both quantifiers

Check criterion_4() {
    Check c;
    const auto params = unit_params(8, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto gamma = thermal_covariance(h, normal_modes(h), 0.1);
    const std::string want = Bipartition::zigzag(8).label();

    const auto [cut_neg, vneg] = best_bipartition(gamma, Quantifier::LogNeg, true);
    c.require(cut_neg.label() == want,
              "log-negativity ranks " + cut_neg.label() + " first (want " +
                  want + ")");
    const auto [cut_wit, vwit] =
        best_bipartition(gamma, Quantifier::SdpWitness, true);
    c.require(cut_wit.label() == want,
              "SDP witness ranks " + cut_wit.label() + " first (want " + want +
                  ")");
    c.note(fmt("best values: E_N = %.4f, W = %.4f", vneg, vwit));
    return c;
}

// ---------------------------------------------------------------------------
// 5. adiabatic invariance of mode occupations

Check criterion_5() {
    Check c;
    const auto params = unit_params(8, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);
    const double temp = 0.5;
    const auto gamma0 = thermal_covariance(h, basis, temp);

    VectorXd n0(8);
    {
        const auto ms = mode_basis_structure(gamma0, basis);
        for (int k = 0; k < 8; ++k)
            n0(k) = (std::sqrt(ms.a(k) * ms.b(k)) - 1.0) / 2.0;
    }

    const double lam_f = 1.0 / 0.9;
    const auto ref = adiabatic_reference(params, basis, temp, lam_f);
    double prev_dev = 1e300, dev = 0.0, gdev = 0.0;
    bool monotone = true;
    for (int k = 0; k <= 4; ++k) {
        const double total_time = 12.5 * (1 << k);
        const int n_steps = static_cast<int>(total_time * 80);
        const auto endp =
            run_compression(gamma0, params, {0.9, total_time, n_steps}, 0)
                .back()
                .gamma;
        const auto ms = mode_basis_structure(endp, basis);
        dev = 0.0;
        for (int m = 0; m < 8; ++m) {
            const double nf = (std::sqrt(ms.a(m) * ms.b(m)) - 1.0) / 2.0;
            dev = std::max(dev, std::abs(nf - n0(m)) / n0(m));
        }
        if (dev >= prev_dev) monotone = false;
        prev_dev = dev;
        gdev = (endp.entries() - ref.entries()).cwiseAbs().maxCoeff() /
               ref.entries().cwiseAbs().maxCoeff();
    }
    c.require(monotone, "occupation deviation shrinks at every time doubling");
    c.require(dev <= 1e-3,
              fmt("final occupation deviation %.2e <= 1e-3 relative", dev));
    c.require(gdev <= 1e-3,
              fmt("final state matches the invariant-occupation reference,"
                  " %.2e <= 1e-3 max-norm", gdev));
    return c;
}

// ---------------------------------------------------------------------------
// 6. compression activates entanglement from a separable start

Check criterion_6() {
    Check c;
    // gapped soft mode (regularized Neumann chain): the gap is held fixed
    // while the phonon branch stiffens, so the extremal frequency ratio drops
    // during compression and the witness climbs
    const auto params = unit_params(8, Boundary::Neumann, 0.01);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);
    const double tstar = analytic_root(basis);
    const double temp = 1.05 * tstar;
    const auto gamma0 = thermal_covariance(h, basis, temp);

    const auto w0 = cmc_witness(gamma0, PartitionSpec::full(8));
    c.require(w0.witness_value <= 1e-8,
              fmt("start at T = 1.05 T* is separable (W = %+.2e)",
                  w0.witness_value));

    const CompressionProtocol proto{0.6, 250.0, 25000};
    const auto end = run_compression(gamma0, params, proto, 0).back().gamma;
    const auto wf = cmc_witness(end, PartitionSpec::full(8));
    c.require(wf.witness_value > 0,
              fmt("slow compression to ratio 0.6 drives W positive"
                  " (W = %+.4f)", wf.witness_value));
    const auto basis_f =
        normal_modes(step_hamiltonian(params, proto, proto.n_steps - 1));
    c.note(fmt("adiabatic prediction at the endpoint: %+.4f",
               witness_adiabatic_analytic(basis, basis_f, temp).value));
    return c;
}

// ---------------------------------------------------------------------------
// 7. bath contact thermalizes and destroys entanglement

Check criterion_7() {
    Check c;
    const auto params = unit_params(8, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);

    const CompressionProtocol proto{0.9, 4.0, 400};
    const auto h_comp = step_hamiltonian(params, proto, proto.n_steps - 1);
    const auto basis_comp = normal_modes(h_comp);
    const double t_bath = 3.0;  // above the extinction temperature
    const BathSpec bath{t_bath, 2.0};
    const auto [g, d] = build_drift_dissipation(h_comp, basis_comp, bath);

    const MatrixXd steady = solve_lyapunov_steady(g, d);
    const MatrixXd expect =
        thermal_covariance(h_comp, basis_comp, t_bath).entries();
    const double dev = (steady - expect).cwiseAbs().maxCoeff() /
                       expect.cwiseAbs().maxCoeff();
    c.require(dev <= 1e-8,
              fmt("Lyapunov steady state equals the bath thermal covariance,"
                  " %.2e <= 1e-8", dev));

    // post-compression states at two speeds, driven into the bath
    const double feas_tol = 1e-8;
    for (double comp_time : {4.0, 0.2}) {
        const int steps = static_cast<int>(comp_time * 100);
        const auto start =
            run_compression(thermal_covariance(h, basis, 0.1), params,
                            {0.9, comp_time, steps}, 0)
                .back()
                .gamma;
        const double w_in =
            cmc_witness(start, PartitionSpec::full(8)).witness_value;
        double w_end = 0.0;
        for (const auto& s : thermalize(start, g, d, 12.0, 12))
            w_end = cmc_witness(s.gamma, PartitionSpec::full(8), 1e-9, feas_tol)
                        .witness_value;
        c.require(w_in > 0 && w_end <= feas_tol,
                  fmt("compression over t = %.1f: W %.3f -> %+.1e <= 1e-8",
                      comp_time, w_in, w_end));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 8. continuum limit of the witness

Check criterion_8() {
    Check c;
    const double temp = 0.1;
    auto p = unit_params(250, Boundary::Dirichlet);
    p.box_length = 250.0;  // fixed box, shrinking pixels

    {
        p.n_pixels = 2000;
        const double exact =
            witness_thermal_analytic(normal_modes(build_hamiltonian(p)), temp)
                .value;
        const double asym =
            witness_asymptotics(p, temp, AsymptoticRegime::ContinuumFixedL);
        c.require(std::abs(exact - asym) <= 0.01 * std::abs(exact),
                  fmt("N = 2000: exact %.6f vs continuum formula %.6f"
                      " within 1%%", exact, asym));
    }
    double prev = -1e300;
    bool monotone = true;
    double last = 0.0;
    for (int n : {250, 500, 1000, 2000}) {
        p.n_pixels = n;
        last = witness_thermal_analytic(normal_modes(build_hamiltonian(p)), temp)
                   .value;
        if (last <= prev) monotone = false;
        prev = last;
    }
    c.require(monotone && last < 1.0,
              fmt("witness rises monotonically toward 1 as pixels shrink"
                  " (last %.4f)", last));
    return c;
}

// ---------------------------------------------------------------------------
// 9. structural invariants

Check criterion_9() {
    Check c;
    std::mt19937 rng(7);

    // spectrum preservation along a unitary stroke
    const auto params = unit_params(6, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);
    const auto gamma0 = thermal_covariance(h, basis, 0.3);
    const auto end =
        run_compression(gamma0, params, {0.8, 1.5, 300}, 0).back().gamma;
    const double spec_dev = (symplectic_eigenvalues(end).values -
                             symplectic_eigenvalues(gamma0).values)
                                .cwiseAbs()
                                .maxCoeff();
    c.require(spec_dev <= 1e-8,
              fmt("symplectic spectrum preserved to %.1e <= 1e-8", spec_dev));

    // propagator symplecticity
    const SymplecticForm form{6, params.eta()};
    const MatrixXd gen = form.mul_left(h.full()) * params.eta();
    const MatrixXd s = matrix_exponential(gen, 0.9);
    const double defect =
        (s * form.matrix() * s.transpose() - form.matrix()).cwiseAbs().maxCoeff();
    c.require(defect <= 1e-10,
              fmt("propagator symplectic to %.1e <= 1e-10", defect));

    // weak duality on direct solver calls
    bool weak = true;
    for (double t : {0.1, 0.5, 2.0}) {
        const auto prob = build_cmc_primal(thermal_covariance(h, basis, t),
                                           PartitionSpec::full(6));
        const auto sol = solve(prob);
        if (sol.status != SdpStatus::Optimal ||
            sol.dual_obj > sol.primal_obj + 1e-6)
            weak = false;
    }
    c.require(weak, "weak duality holds on every SDP solve");

    // witness never fires on product states
    std::uniform_real_distribution<> nu_dist(1.0, 3.0), r_dist(-0.8, 0.8),
        th_dist(0.0, 3.141592653589793);
    int fired = 0;
    double wmax = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 3;
        MatrixXd g = MatrixXd::Zero(2 * n, 2 * n);
        for (int j = 0; j < n; ++j) {
            const double r = r_dist(rng), th = th_dist(rng);
            Eigen::Matrix2d sq, rot;
            sq << std::exp(r), 0, 0, std::exp(-r);
            rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            const Eigen::Matrix2d local =
                nu_dist(rng) * rot * sq * sq * rot.transpose();
            g(j, j) = local(0, 0);
            g(j, n + j) = g(n + j, j) = local(0, 1);
            g(n + j, n + j) = local(1, 1);
        }
        const auto cert =
            cmc_witness(CovarianceMatrix(g, 1.0), PartitionSpec::full(n));
        wmax = std::max(wmax, cert.witness_value);
        if (cert.witness_value > 1e-8) ++fired;
    }
    c.require(fired == 0,
              fmt("witness <= 0 on 100 separable products (max %+.1e)", wmax));

    // first-law bookkeeping of a full engine cycle
    OttoCycleSpec spec;
    spec.compression = {0.9, 2.0, 200};
    spec.expansion = {1.0 / 0.9, 2.0, 200};
    spec.hot_bath = {0.6, 3.0};
    spec.cold_bath = {0.3, 3.0};
    spec.bath_stroke_time = 8.0;
    spec.bath_substeps = 16;
    const auto result = run_otto_cycle(params, spec, 0.3);
    double emax = 0.0;
    for (const auto& st : result.ledger.strokes)
        emax = std::max(emax, std::abs(st.delta_e));
    const double res = result.ledger.first_law_residual();
    c.require(res <= 1e-9 * emax,
              fmt("first-law ledger residual %.1e <= 1e-9 of the largest"
                  " stroke", res / emax));
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    struct Entry {
        int id;
        const char* title;
        Check (*run)();
    };
    const Entry entries[] = {
        {1, "critical temperature of the reference condensate", criterion_1},
        {2, "SDP matches the analytic witness on Dirichlet chains", criterion_2},
        {3, "witness root coincides with negativity extinction", criterion_3},
        {4, "alternating bipartition is optimal", criterion_4},
        {5, "adiabatic invariance of mode occupations", criterion_5},
        {6, "compression activates entanglement", criterion_6},
        {7, "bath thermalization and entanglement destruction", criterion_7},
        {8, "continuum limit of the witness", criterion_8},
        {9, "structural invariants", criterion_9},
    };

    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 9) {
            std::fprintf(stderr, "usage: %s [criterion 1-9]\n", argv[0]);
            return 2;
        }
    }

    int failures = 0;
    for (const auto& e : entries) {
        if (only && e.id != only) continue;
        const Check c = e.run();
        std::printf("criterion %d: %s - %s\n", e.id, c.ok ? "PASS" : "FAIL",
                    e.title);
        for (const auto& line : c.notes) std::printf("    %s\n", line.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    return failures;
}
