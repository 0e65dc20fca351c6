#include "bec/bath.hpp"

#include <cmath>

#include "bec/entanglement.hpp"
#include "bec/sdp.hpp"

namespace bec {

using Eigen::MatrixXd;

std::pair<MatrixXd, MatrixXd> build_drift_dissipation(
    const QuadraticHamiltonian& h, const NormalModeBasis& basis,
    const BathSpec& bath) {
    if (bath.temperature <= 0)
        throw NonPositiveTemperatureError("bath temperature must be positive");
    if (bath.coupling_gamma <= 0)
        throw NonPositiveInputError("bath coupling must be positive");
    if (basis.frequencies.minCoeff() <= 0)
        throw ZeroModeError("bath coupling needs all mode frequencies positive");

    const int n = h.n_sites();
    const double eta = 1.0 / h.pixel_size;
    MatrixXd g = SymplecticForm{n, 1.0}.mul_left(h.full()) * eta;
    g.diagonal().array() -= bath.coupling_gamma / 2.0;
    const MatrixXd d =
        bath.coupling_gamma *
        thermal_covariance(h, basis, bath.temperature).entries();
    return {std::move(g), std::move(d)};
}

std::vector<Snapshot> thermalize(const CovarianceMatrix& gamma0,
                                 const Eigen::MatrixXd& g_drift,
                                 const Eigen::MatrixXd& d_diffusion,
                                 double duration, int n_substeps) {
    if (n_substeps < 1 || duration < 0)
        throw NonPositiveInputError("thermalize: bad duration or substep count");
    const int dim = 2 * gamma0.n_modes();
    if (g_drift.rows() != dim || d_diffusion.rows() != dim)
        throw DimensionMismatchError("thermalize: size mismatch");

    const MatrixXd ginf = solve_lyapunov_steady(g_drift, d_diffusion);
    const double delta = duration / n_substeps;
    const MatrixXd e = matrix_exponential(g_drift, delta);

    std::vector<Snapshot> out;
    out.push_back(Snapshot{0.0, 1.0, gamma0});
    MatrixXd diff = gamma0.entries() - ginf;
    for (int k = 1; k <= n_substeps; ++k) {
        diff = e * diff * e.transpose();
        MatrixXd gk = ginf + diff;
        gk = 0.5 * (gk + gk.transpose()).eval();
        out.push_back(Snapshot{k * delta, 1.0,
                               CovarianceMatrix(std::move(gk), gamma0.eta())});
    }
    return out;
}

double mean_energy(const CovarianceMatrix& gamma, const QuadraticHamiltonian& h) {
    if (h.n_sites() != gamma.n_modes())
        throw DimensionMismatchError("mean_energy: size mismatch");
    // H = (Delta/2) X^T M X and Gamma holds doubled second moments, so
    // <H> = (Delta/4) tr(M Gamma)
    return 0.25 * h.pixel_size *
           (h.full().array() * gamma.entries().array()).sum();
}

std::vector<std::string> OttoCycleSpec::validate() const {
    auto warn = compression.validate();
    for (auto& w : expansion.validate()) warn.push_back(std::move(w));
    const double closure =
        compression.length_ratio_final * expansion.length_ratio_final;
    if (std::abs(closure - 1.0) > 1e-9)
        throw UnphysicalInputError("expansion ratio must invert compression");
    if (hot_bath.temperature <= 0 || cold_bath.temperature <= 0)
        throw NonPositiveTemperatureError("bath temperatures must be positive");
    if (hot_bath.coupling_gamma <= 0 || cold_bath.coupling_gamma <= 0)
        throw NonPositiveInputError("bath couplings must be positive");
    if (bath_stroke_time < 0 || bath_substeps < 1)
        throw NonPositiveInputError("bad bath stroke discretization");
    return warn;
}

double EnergyLedger::total_delta_e() const {
    double s = 0;
    for (const auto& st : strokes) s += st.delta_e;
    return s;
}

double EnergyLedger::total_work() const {
    double s = 0;
    for (const auto& st : strokes)
        if (st.unitary) s += st.delta_e;
    return s;
}

double EnergyLedger::total_heat() const {
    double s = 0;
    for (const auto& st : strokes)
        if (!st.unitary) s += st.delta_e;
    return s;
}

double EnergyLedger::first_law_residual() const {
    return std::abs(total_delta_e() - (total_work() + total_heat()));
}

OttoResult run_otto_cycle(const PhysicalParams& params, const OttoCycleSpec& spec,
                          double initial_T) {
    params.validate();
    spec.validate();
    if (initial_T <= 0)
        throw NonPositiveTemperatureError("initial temperature must be positive");

    const QuadraticHamiltonian h0 = build_hamiltonian(params);
    const NormalModeBasis basis0 = normal_modes(h0);
    const QuadraticHamiltonian h_comp =
        step_hamiltonian(params, spec.compression, spec.compression.n_steps - 1);
    const NormalModeBasis basis_comp = normal_modes(h_comp);
    const double lambda_f = spec.compression.lambda_after(spec.compression.n_steps);

    OttoResult result{.strokes = {},
                      .ledger = {},
                      .entanglement = {},
                      .final_state = thermal_covariance(h0, basis0, initial_T)};
    const double e_start =
        mean_energy(result.final_state, h0);

    double t0 = 0.0;
    double e_prev = e_start;
    auto finish_stroke = [&](std::string name, bool unitary,
                             std::vector<Snapshot> snaps,
                             const QuadraticHamiltonian& h_end) {
        for (auto& s : snaps) s.time += t0;
        t0 = snaps.back().time;
        result.final_state = snaps.back().gamma;
        const double e_now = mean_energy(result.final_state, h_end);
        result.ledger.strokes.push_back(
            EnergyLedger::Stroke{name, unitary, e_now - e_prev});
        e_prev = e_now;
        result.strokes.push_back(
            StrokeTrace{std::move(name), unitary, std::move(snaps)});
    };

    finish_stroke("compression", true,
                  run_compression(result.final_state, params, spec.compression,
                                  spec.snapshot_every),
                  h_comp);
    {
        auto [g, d] = build_drift_dissipation(h_comp, basis_comp, spec.hot_bath);
        auto snaps = thermalize(result.final_state, g, d, spec.bath_stroke_time,
                                spec.bath_substeps);
        for (auto& s : snaps) s.lambda = lambda_f;
        finish_stroke("hot bath", false, std::move(snaps), h_comp);
    }
    finish_stroke("expansion", true,
                  run_compression_segment(result.final_state, params,
                                          spec.expansion, lambda_f,
                                          spec.snapshot_every),
                  h0);
    {
        auto [g, d] = build_drift_dissipation(h0, basis0, spec.cold_bath);
        finish_stroke("cold bath", false,
                      thermalize(result.final_state, g, d, spec.bath_stroke_time,
                                 spec.bath_substeps),
                      h0);
    }

    if (spec.entanglement_every > 0) {
        const int n = params.n_pixels;
        const auto full = PartitionSpec::full(n);
        const auto zig = Bipartition::zigzag(n);
        for (const auto& stroke : result.strokes) {
            const auto& snaps = stroke.snapshots;
            for (size_t i = 0; i < snaps.size(); ++i) {
                const bool last = i + 1 == snaps.size();
                if (!last && i % spec.entanglement_every != 0) continue;
                if (!result.entanglement.empty() &&
                    result.entanglement.back().time == snaps[i].time)
                    continue;
                const auto cert = cmc_witness(snaps[i].gamma, full);
                result.entanglement.push_back(
                    EntanglementSample{snaps[i].time, cert.witness_value,
                                       cert.x_e,
                                       log_negativity(snaps[i].gamma, zig)});
            }
        }
    }
    return result;
}

}  // namespace bec
