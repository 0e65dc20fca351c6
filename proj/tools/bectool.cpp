// Command-line front end: scenario ingestion plus the four experiment
// drivers (thermal-scan, compress, otto, bipartitions). Output is CSV with a
// JSON sidecar so plotting stays outside this tool.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "bec/entanglement.hpp"
#include "bec/scenario.hpp"
#include "bec/sdp.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using bec::Bipartition;
using bec::CovarianceMatrix;
using bec::PartitionSpec;
using nlohmann::json;

struct Overrides {
    std::optional<std::string> bc;
    std::optional<double> mu_rel;
    std::optional<double> tol;
    std::string out_dir;
};

bec::Scenario load(const std::string& path, const Overrides& ov) {
    bec::Scenario s = bec::load_scenario(path);
    if (ov.bc) {
        s.model.params.boundary =
            *ov.bc == "neumann" ? bec::Boundary::Neumann : bec::Boundary::Dirichlet;
    }
    if (ov.mu_rel)
        s.model.params.zero_mode_mu = *ov.mu_rel * s.model.params.phi_prefactor();
    if (ov.tol) s.run.gap_tol = s.run.feas_tol = *ov.tol;
    if (!ov.out_dir.empty()) s.run.output_dir = ov.out_dir;
    s.model.params.validate();
    return s;
}

std::ofstream open_out(const bec::Scenario& s, const std::string& name) {
    std::filesystem::create_directories(s.run.output_dir);
    const auto path = std::filesystem::path(s.run.output_dir) / name;
    std::ofstream out(path);
    if (!out) throw bec::Error("cannot open " + path.string());
    out.precision(std::numeric_limits<double>::max_digits10);
    return out;
}

double min_symplectic(const CovarianceMatrix& gamma) {
    return bec::symplectic_eigenvalues(gamma).values.minCoeff();
}

// Hamiltonian of the co-compressing frame at compression factor lambda.
bec::QuadraticHamiltonian hamiltonian_at(const bec::PhysicalParams& params,
                                         double lambda) {
    bec::QuadraticHamiltonian h = bec::build_hamiltonian(params);
    const double mu = params.zero_mode_mu;
    h.block_rho *= lambda;
    h.block_phi = lambda * lambda * (h.block_phi.array() -
                                     mu * Eigen::MatrixXd::Identity(
                                              h.n_sites(), h.n_sites()).array())
                      .matrix() +
                  mu * Eigen::MatrixXd::Identity(h.n_sites(), h.n_sites());
    return h;
}

// Tracks whether every SDP solve in a run reached Optimal.
struct SolveTracker {
    bool all_optimal = true;

    bec::WitnessCertificate witness(const CovarianceMatrix& gamma,
                                    const PartitionSpec& part, double gap_tol,
                                    double feas_tol) {
        auto cert = bec::cmc_witness(gamma, part, gap_tol, feas_tol);
        if (cert.status != bec::SdpStatus::Optimal) all_optimal = false;
        return cert;
    }
};

int cmd_thermal_scan(const bec::Scenario& s, double tmin_nK, double tmax_nK,
                     int n_points) {
    if (n_points < 1 || tmin_nK <= 0 || tmax_nK < tmin_nK)
        throw bec::Error("bad temperature range");
    const auto& params = s.model.params;
    const auto h = bec::build_hamiltonian(params);
    const auto basis = bec::normal_modes(h);
    const auto zig = Bipartition::zigzag(params.n_pixels);
    const auto full = PartitionSpec::full(params.n_pixels);
    SolveTracker tracker;

    auto csv = open_out(s, "thermal_scan.csv");
    csv << "temperature_nK,witness_analytic,witness_sdp,x_e,"
           "log_negativity_zigzag,energy,min_symplectic_eig\n";
    for (int i = 0; i < n_points; ++i) {
        const double t_nK =
            n_points == 1 ? tmin_nK
                          : tmin_nK + (tmax_nK - tmin_nK) * i / (n_points - 1);
        const double t = s.model.units.temperature_from_nK(t_nK);
        const auto gamma = bec::thermal_covariance(h, basis, t);
        const auto cert =
            tracker.witness(gamma, full, s.run.gap_tol, s.run.feas_tol);
        csv << t_nK << ',' << bec::witness_thermal_analytic(basis, t).value
            << ',' << cert.witness_value << ',' << cert.x_e << ','
            << bec::log_negativity(gamma, zig) << ','
            << bec::mean_energy(gamma, h) << ',' << min_symplectic(gamma)
            << '\n';
    }

    // zero crossing of the analytic witness, bisected to 1e-4 relative
    auto wa = [&](double t_nK) {
        return bec::witness_thermal_analytic(
                   basis, s.model.units.temperature_from_nK(t_nK))
            .value;
    };
    json sidecar;
    sidecar["t_star_nK"] = nullptr;
    if (wa(tmin_nK) > 0 && wa(tmax_nK) < 0) {
        double lo = tmin_nK, hi = tmax_nK;
        while (hi - lo > 1e-4 * hi) {
            const double mid = 0.5 * (lo + hi);
            (wa(mid) > 0 ? lo : hi) = mid;
        }
        sidecar["t_star_nK"] = 0.5 * (lo + hi);
        sidecar["t_star_bracket_nK"] = {lo, hi};
    }
    open_out(s, "thermal_scan.json") << sidecar.dump(2) << '\n';
    return tracker.all_optimal ? 0 : 1;
}

int cmd_compress(const bec::Scenario& s) {
    if (!s.protocol) throw bec::Error("scenario has no protocol section");
    const auto& params = s.model.params;
    const auto h0 = bec::build_hamiltonian(params);
    const auto basis0 = bec::normal_modes(h0);
    const double t_int = s.model.temperature;
    const auto gamma0 = bec::thermal_covariance(h0, basis0, t_int);
    const auto snaps = bec::run_compression(gamma0, params, *s.protocol,
                                            s.protocol_snapshot_every);
    const auto zig = Bipartition::zigzag(params.n_pixels);
    const auto full = PartitionSpec::full(params.n_pixels);
    SolveTracker tracker;

    auto csv = open_out(s, "compress.csv");
    csv << "time_s,lambda,witness_sdp,x_e,log_negativity_zigzag,energy,"
           "witness_adiabatic_ref,min_symplectic_eig\n";
    for (const auto& snap : snaps) {
        const auto h_now = hamiltonian_at(params, snap.lambda);
        const auto cert =
            tracker.witness(snap.gamma, full, s.run.gap_tol, s.run.feas_tol);
        csv << s.model.units.time_to_s(snap.time) << ',' << snap.lambda << ','
            << cert.witness_value << ',' << cert.x_e << ','
            << bec::log_negativity(snap.gamma, zig) << ','
            << bec::mean_energy(snap.gamma, h_now) << ','
            << bec::witness_adiabatic_analytic(basis0, bec::normal_modes(h_now),
                                               t_int)
                   .value
            << ',' << min_symplectic(snap.gamma) << '\n';
    }
    return tracker.all_optimal ? 0 : 1;
}

int cmd_otto(const bec::Scenario& s) {
    if (!s.cycle) throw bec::Error("scenario has no cycle section");
    const auto result =
        bec::run_otto_cycle(s.model.params, *s.cycle, s.model.temperature);

    auto csv = open_out(s, "otto.csv");
    csv << "stroke,time_s,lambda,energy,min_symplectic_eig\n";
    for (const auto& stroke : result.strokes) {
        for (const auto& snap : stroke.snapshots) {
            const auto h_snap = hamiltonian_at(s.model.params, snap.lambda);
            csv << stroke.name << ',' << s.model.units.time_to_s(snap.time)
                << ',' << snap.lambda << ',' << bec::mean_energy(snap.gamma, h_snap)
                << ',' << min_symplectic(snap.gamma) << '\n';
        }
    }

    json ledger;
    for (const auto& st : result.ledger.strokes)
        ledger["strokes"].push_back({{"name", st.name},
                                     {"unitary", st.unitary},
                                     {"delta_e", st.delta_e}});
    ledger["total_delta_e"] = result.ledger.total_delta_e();
    ledger["total_work"] = result.ledger.total_work();
    ledger["total_heat"] = result.ledger.total_heat();
    ledger["first_law_residual"] = result.ledger.first_law_residual();
    for (const auto& e : result.entanglement)
        ledger["entanglement"].push_back(
            {{"time_s", s.model.units.time_to_s(e.time)},
             {"witness_value", e.witness_value},
             {"x_e", e.x_e},
             {"log_negativity_zigzag", e.log_neg_zigzag}});
    open_out(s, "otto_ledger.json") << ledger.dump(2) << '\n';
    return 0;
}

int cmd_bipartitions(const bec::Scenario& s, const std::string& quantifier) {
    const auto& params = s.model.params;
    const int n = params.n_pixels;
    const auto h = bec::build_hamiltonian(params);
    const auto basis = bec::normal_modes(h);
    const auto gamma = bec::thermal_covariance(h, basis, s.model.temperature);
    SolveTracker tracker;

    std::vector<Bipartition> cuts;
    if (n <= 22) {
        const std::uint64_t top = (std::uint64_t(1) << n) - 1;
        for (std::uint64_t mask = 1; mask < top; mask += 2) {
            std::vector<int> a;
            for (int i = 0; i < n; ++i)
                if (mask & (std::uint64_t(1) << i)) a.push_back(i);
            cuts.push_back(Bipartition::of(std::move(a), n));
        }
    } else {
        for (int k = 1; k < n; ++k) {
            std::vector<int> a(k);
            for (int i = 0; i < k; ++i) a[i] = i;
            cuts.push_back(Bipartition::of(std::move(a), n));
        }
        cuts.push_back(Bipartition::zigzag(n));
        for (int i = 1; i < n; ++i) cuts.push_back(Bipartition::of({i}, n));
    }

    std::vector<std::pair<std::string, double>> rows;
    for (const auto& cut : cuts) {
        double v;
        if (quantifier == "negativity") {
            v = bec::log_negativity(gamma, cut);
        } else {
            v = tracker
                    .witness(gamma, PartitionSpec::bipartition(cut.part_a, n),
                             s.run.gap_tol, s.run.feas_tol)
                    .witness_value;
        }
        rows.emplace_back(cut.label(), v);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    auto csv = open_out(s, "bipartitions.csv");
    csv << "cut," << quantifier << '\n';
    for (const auto& [label, v] : rows) csv << label << ',' << v << '\n';
    return tracker.all_optimal ? 0 : 1;
}

int cmd_validate(const bec::Scenario& s) {
    json out;
    const auto& p = s.model.params;
    out["n_pixels"] = p.n_pixels;
    out["box_length_um"] = p.box_length;
    out["pixel_size_um"] = p.pixel_size();
    out["coupling_g"] = p.coupling_g;
    out["mean_density_per_um"] = p.mean_density;
    out["zero_mode_mu"] = p.zero_mode_mu;
    out["boundary"] = p.boundary == bec::Boundary::Neumann ? "neumann" : "dirichlet";
    out["temperature_internal"] = s.model.temperature;
    out["temperature_nK"] = s.model.units.temperature_to_nK(s.model.temperature);
    out["lieb_liniger_gamma"] = p.lieb_liniger_gamma();
    out["healing_length_um"] = bec::healing_length(p);
    out["has_protocol"] = s.protocol.has_value();
    out["has_cycle"] = s.cycle.has_value();
    out["warnings"] = p.validate();
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D Bose gas covariance-matrix toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    Overrides ov;
    int threads = 0;
    app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
    app.add_option("--out", ov.out_dir, "output directory");
    app.add_option("--bc", ov.bc, "boundary condition override")
        ->check(CLI::IsMember({"neumann", "dirichlet"}));
    app.add_option("--mu-rel", ov.mu_rel, "zero-mode regularizer, relative");
    app.add_option("--tol", ov.tol, "SDP gap and feasibility tolerance");
    app.add_option("--threads", threads, "BLAS thread count");

    auto* scan = app.add_subcommand("thermal-scan", "witness vs temperature");
    double tmin = 0, tmax = 0;
    int n_points = 0;
    scan->add_option("--tmin-nK", tmin)->required();
    scan->add_option("--tmax-nK", tmax)->required();
    scan->add_option("--n-points", n_points)->required();

    auto* compress = app.add_subcommand("compress", "compression protocol run");
    auto* otto = app.add_subcommand("otto", "four-stroke cycle");
    auto* bip = app.add_subcommand("bipartitions", "entanglement per cut");
    std::string quantifier = "negativity";
    bip->add_option("--quantifier", quantifier)
        ->check(CLI::IsMember({"negativity", "witness"}));
    auto* validate = app.add_subcommand("validate-scenario", "parse and echo");

    CLI11_PARSE(app, argc, argv);

    if (threads == 0) {
        if (const char* env = std::getenv("BOGOLIB_THREADS"))
            threads = std::atoi(env);
    }
    if (threads < 1) threads = 1;
    openblas_set_num_threads(threads);
    Eigen::setNbThreads(threads);

    try {
        const bec::Scenario s = load(scenario_path, ov);
        if (scan->parsed()) return cmd_thermal_scan(s, tmin, tmax, n_points);
        if (compress->parsed()) return cmd_compress(s);
        if (otto->parsed()) return cmd_otto(s);
        if (bip->parsed()) return cmd_bipartitions(s, quantifier);
        if (validate->parsed()) return cmd_validate(s);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
    return 2;
}
