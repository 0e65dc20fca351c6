#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <random>

#include "bec/dynamics.hpp"
#include "bec/entanglement.hpp"
#include "bec/sdp.hpp"
#include "test_util.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace bec;

namespace {

PhysicalParams unit_params(int n, Boundary bc) {
    PhysicalParams p;
    p.mass = 1.0;
    p.coupling_g = 1.0;
    p.mean_density = 1.0;
    p.box_length = n;
    p.n_pixels = n;
    p.zero_mode_mu = 0.0;
    p.boundary = bc;
    return p;
}

CovarianceMatrix thermal_state(const PhysicalParams& p, double t) {
    const auto h = build_hamiltonian(p);
    return thermal_covariance(h, normal_modes(h), t);
}

void check_solution_invariants(const SdpProblem& prob, const SdpSolution& sol) {
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.gap <= 1e-8 * std::max(1.0, std::abs(sol.primal_obj)));
    CHECK(sol.gap >= -1e-8);
    CHECK(sol.dual_obj <= sol.primal_obj + 1e-6);
    CHECK(sol.dual_residual <= 1e-6);
    // primal feasibility and complementary slackness per block
    for (int b = 0; b < prob.n_blocks(); ++b) {
        const MatrixXd f = prob.assemble(b, sol.x);
        const Eigen::SelfAdjointEigenSolver<MatrixXd> es(f);
        CHECK(es.eigenvalues()(0) >= -1e-7 * std::max(1.0, f.cwiseAbs().maxCoeff()));
        CHECK((sol.z_blocks[b] * f).cwiseAbs().maxCoeff() <= 1e-4);
    }
}

}  // namespace

TEST_CASE("one-dimensional toy problem") {
    SdpProblem p;
    p.objective = VectorXd::Ones(1);
    p.f0 = {(MatrixXd(1, 1) << -1.0).finished()};
    p.coeffs = {{{SparseEntry{0, 0, 1.0}}}};

    const auto sol = solve(p);
    check_solution_invariants(p, sol);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.primal_obj == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("two-variable toy problem") {
    // min x1 + x2 s.t. [[x1, 1], [1, x2]] >= 0; optimum x1 = x2 = 1
    SdpProblem p;
    p.objective = VectorXd::Ones(2);
    p.f0 = {(MatrixXd(2, 2) << 0, 1, 1, 0).finished()};
    p.coeffs = {{{SparseEntry{0, 0, 1.0}}, {SparseEntry{1, 1, 1.0}}}};

    const auto sol = solve(p);
    check_solution_invariants(p, sol);
    CHECK(sol.primal_obj == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("infeasible problem is flagged") {
    SdpProblem p;
    p.objective = VectorXd::Ones(1);
    p.f0 = {(MatrixXd(1, 1) << -1.0).finished()};
    p.coeffs = {{{}}};  // the variable never enters the constraint
    CHECK(solve(p).status == SdpStatus::Infeasible);
}

TEST_CASE("cmc problem construction") {
    CHECK_THROWS_AS(PartitionSpec::full(1), InvalidPartitionError);
    CHECK_THROWS_AS(PartitionSpec::bipartition({0, 1}, 2), InvalidPartitionError);
    CHECK_THROWS_AS((PartitionSpec{{{0}, {0, 1}}}.validate(2)),
                    InvalidPartitionError);

    const CovarianceMatrix gamma(2.0 * MatrixXd::Identity(4, 4), 1.0);
    const auto prob = build_cmc_primal(gamma, PartitionSpec::full(2));
    CHECK(prob.n_vars() == 7);  // x_e plus two 2x2 symmetric blocks
    CHECK(prob.n_blocks() == 2);
    CHECK(prob.f0[0].rows() == 4);
    CHECK(prob.f0[1].rows() == 8);
    REQUIRE(prob.feasible_x.has_value());
    prob.validate();
    // the supplied start is strictly feasible
    for (int b = 0; b < 2; ++b) {
        const MatrixXd f = prob.assemble(b, *prob.feasible_x);
        CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(f).eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("comfortably thermal state is separable") {
    const CovarianceMatrix gamma(2.0 * MatrixXd::Identity(6, 6), 1.0);
    const auto cert = cmc_witness(gamma, PartitionSpec::full(3));
    CHECK(cert.status == SdpStatus::Optimal);
    CHECK(cert.x_e >= -1e-8);
    CHECK(cert.witness_value <= 1e-7);
    CHECK(cert.certificate_residual <= 1e-5);
}

TEST_CASE("thermal witness matches the analytic form") {
    const auto params = unit_params(4, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);

    // below T*: entangled, SDP dual equals the closed form
    {
        const auto gamma = thermal_covariance(h, basis, 0.1);
        const auto cert = cmc_witness(gamma, PartitionSpec::full(4));
        CHECK(cert.status == SdpStatus::Optimal);
        CHECK(cert.x_e < 0.0);
        const double analytic = witness_thermal_analytic(basis, 0.1).value;
        CHECK(cert.witness_value == doctest::Approx(analytic).epsilon(1e-6));
        CHECK(cert.witness_value ==
              doctest::Approx(0.4288017177040443).epsilon(1e-5));
        // strong duality: witness value = -x_e
        CHECK(cert.witness_value == doctest::Approx(-cert.x_e).epsilon(1e-6));

        // independent recomputation of the reported value
        CHECK(cert.witness_value ==
              doctest::Approx(1.0 -
                              (cert.z_real.array() * gamma.entries().array())
                                  .sum())
                  .epsilon(1e-10));
        CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(cert.z_real)
                  .eigenvalues()(0) >= -1e-8);
    }

    // above T*: no detection
    {
        const auto gamma = thermal_covariance(h, basis, 3.0);
        const auto cert = cmc_witness(gamma, PartitionSpec::full(4));
        CHECK(cert.x_e >= -1e-7);
        CHECK(cert.witness_value <= 1e-7);
    }
}

TEST_CASE("detection consistency on random states") {
    std::mt19937 rng(41);
    int detected = 0, separable = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 2;
        VectorXd d(n);
        for (int i = 0; i < n; ++i)
            d(i) = std::uniform_real_distribution<>(1.0, 2.0)(rng);
        MatrixXd diag = MatrixXd::Zero(2 * n, 2 * n);
        diag.diagonal().head(n) = d;
        diag.diagonal().tail(n) = d;
        const MatrixXd s = testutil::random_symplectic(rng, n, 0.5);
        const CovarianceMatrix gamma(s * diag * s.transpose(), 1.0);

        const auto cert = cmc_witness(gamma, PartitionSpec::full(n));
        REQUIRE(cert.status == SdpStatus::Optimal);
        CHECK(cert.witness_value == doctest::Approx(-cert.x_e).epsilon(1e-5));
        if (cert.witness_value > 1e-6) {
            CHECK(cert.x_e < -1e-7);
            ++detected;
        } else {
            ++separable;
        }
        CHECK(cert.certificate_residual <= 1e-5);
    }
    CHECK(detected > 0);
    CHECK(separable > 0);
}

TEST_CASE("partition refinement monotonicity") {
    const auto gamma = thermal_state(unit_params(4, Boundary::Dirichlet), 0.1);
    const double full =
        cmc_witness(gamma, PartitionSpec::full(4)).witness_value;
    for (const auto& a :
         {std::vector<int>{0}, std::vector<int>{0, 2}, std::vector<int>{0, 1}}) {
        const double bi =
            cmc_witness(gamma, PartitionSpec::bipartition(a, 4)).witness_value;
        CHECK(full >= bi - 1e-7);
    }
}

TEST_CASE("witness mode profile") {
    const auto params = unit_params(4, Boundary::Dirichlet);
    const auto h = build_hamiltonian(params);
    const auto basis = normal_modes(h);
    const auto gamma = thermal_covariance(h, basis, 0.1);
    const auto cert = cmc_witness(gamma, PartitionSpec::full(4));

    const VectorXd profile = witness_mode_profile(cert, basis, gamma);
    REQUIRE(profile.size() == 8);
    const double total = profile.sum();
    CHECK(total == doctest::Approx((cert.z_real.array() *
                                    gamma.entries().array())
                                       .sum())
                       .epsilon(1e-10));
    // support concentrated on the extremal quadratures: rho of the softest
    // mode, phi of the stiffest
    for (int i = 0; i < 8; ++i) {
        if (i == 0 || i == 7) continue;
        CHECK(std::abs(profile(i)) < 1e-5 * std::abs(total));
    }
    CHECK(profile(0) > 0.1 * total);
    CHECK(profile(7) > 0.1 * total);

    // identity witness reproduces the mode variances
    WitnessCertificate ident = cert;
    ident.z_real = MatrixXd::Identity(8, 8);
    const VectorXd vars = witness_mode_profile(ident, basis, gamma);
    CHECK(vars.sum() == doctest::Approx(gamma.entries().trace()).epsilon(1e-10));

    // a non-adiabatic compression leaks a little weight off the extremal
    // pair, but the two-quadrature structure keeps dominating
    {
        const auto snaps = run_compression(gamma, params, {0.7, 1.0, 100}, 0);
        const auto cert_fast =
            cmc_witness(snaps.back().gamma, PartitionSpec::full(4));
        REQUIRE(cert_fast.witness_value > 1e-6);
        const VectorXd prof =
            witness_mode_profile(cert_fast, basis, snaps.back().gamma);
        const double tot = prof.sum();
        CHECK(prof(0) + prof(7) > 0.99 * tot);
        double off = 0.0;
        for (int i = 1; i < 7; ++i) off += std::abs(prof(i));
        CHECK(off > 1e-6 * tot);
    }
}

TEST_CASE("problem dump and load round trip") {
    const auto gamma = thermal_state(unit_params(2, Boundary::Dirichlet), 0.2);
    const auto prob = build_cmc_primal(gamma, PartitionSpec::full(2));
    const std::string path = "/tmp/bec_sdp_roundtrip.txt";
    dump_problem(prob, path);
    const auto loaded = load_problem(path);
    std::remove(path.c_str());

    REQUIRE(loaded.n_vars() == prob.n_vars());
    REQUIRE(loaded.n_blocks() == prob.n_blocks());
    CHECK((loaded.objective - prob.objective).cwiseAbs().maxCoeff() == 0.0);
    for (int b = 0; b < prob.n_blocks(); ++b) {
        CHECK((loaded.f0[b] - prob.f0[b]).cwiseAbs().maxCoeff() == 0.0);
        VectorXd x = VectorXd::LinSpaced(prob.n_vars(), -0.3, 0.7);
        CHECK((loaded.assemble(b, x) - prob.assemble(b, x)).cwiseAbs().maxCoeff() ==
              0.0);
    }
    // solvable without the attached feasible point
    const auto sol = solve(loaded);
    CHECK(sol.status == SdpStatus::Optimal);
    CHECK(sol.primal_obj ==
          doctest::Approx(solve(prob).primal_obj).epsilon(1e-6));
}
