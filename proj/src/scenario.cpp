#include "bec/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bec {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& path,
                    const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required key");
    return *it;
}

double num(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& obj, const std::string& path, const std::string& key,
              double fallback) {
    if (!obj.contains(key)) return fallback;
    return num(obj, path, key);
}

int integer(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

ConvertedScenario parse_model(const json& m) {
    const std::string path = "model";
    if (!m.is_object()) fail(path, "expected an object");
    reject_unknown(m, path,
                   {"boundary", "n_pixels", "pixel_size_um", "box_length_um",
                    "atom_count", "temperature_nK", "mu_relative",
                    "atom_mass_kg", "healing_length_um", "coupling_g_si"});

    const std::string bc = require(m, path, "boundary").get<std::string>();
    Boundary boundary;
    if (bc == "neumann")
        boundary = Boundary::Neumann;
    else if (bc == "dirichlet")
        boundary = Boundary::Dirichlet;
    else
        fail(path + ".boundary", "expected \"neumann\" or \"dirichlet\"");

    const double box_length_um = num(m, path, "box_length_um");
    const double atom_count = num(m, path, "atom_count");
    if (box_length_um <= 0 || atom_count <= 0)
        fail(path, "box length and atom count must be positive");

    int n_pixels = 0;
    if (m.contains("n_pixels") == m.contains("pixel_size_um"))
        fail(path, "give exactly one of n_pixels, pixel_size_um");
    if (m.contains("n_pixels")) {
        n_pixels = integer(m, path, "n_pixels");
    } else {
        const double d = num(m, path, "pixel_size_um");
        if (d <= 0) fail(path + ".pixel_size_um", "must be positive");
        n_pixels = static_cast<int>(std::lround(box_length_um / d));
        if (n_pixels < 1 ||
            std::abs(n_pixels * d - box_length_um) > 1e-9 * box_length_um)
            fail(path + ".pixel_size_um", "does not divide box_length_um");
    }

    const double mass_kg = num_or(m, path, "atom_mass_kg", kRb87MassKg);
    if (mass_kg <= 0) fail(path + ".atom_mass_kg", "must be positive");
    const UnitSystem units{mass_kg, kMicron};

    double g_si = 0.0;
    if (m.contains("healing_length_um") == m.contains("coupling_g_si"))
        fail(path, "give exactly one of healing_length_um, coupling_g_si");
    if (m.contains("healing_length_um")) {
        const double xi = num(m, path, "healing_length_um");
        if (xi <= 0) fail(path + ".healing_length_um", "must be positive");
        const double density = atom_count / box_length_um;
        g_si = units.coupling_to_si(1.0 / (xi * xi * density));
    } else {
        g_si = num(m, path, "coupling_g_si");
    }

    const double mu_rel = num_or(m, path, "mu_relative",
                                 boundary == Boundary::Neumann ? 1e-6 : 0.0);
    const double temperature_nK = num(m, path, "temperature_nK");

    return convert_units(mass_kg, g_si, atom_count / (box_length_um * kMicron),
                         box_length_um * kMicron, temperature_nK, n_pixels,
                         boundary, mu_rel);
}

CompressionProtocol parse_protocol(const json& p, const std::string& path,
                                   const UnitSystem& units, int* snapshot_every) {
    if (!p.is_object()) fail(path, "expected an object");
    reject_unknown(p, path,
                   {"length_ratio_final", "total_time_s", "n_steps",
                    "snapshot_every"});
    CompressionProtocol proto;
    proto.length_ratio_final = num(p, path, "length_ratio_final");
    proto.total_time = units.time_from_s(num(p, path, "total_time_s"));
    proto.n_steps = integer(p, path, "n_steps");
    if (snapshot_every && p.contains("snapshot_every"))
        *snapshot_every = integer(p, path, "snapshot_every");
    if (proto.length_ratio_final <= 0 || proto.total_time <= 0 ||
        proto.n_steps < 1)
        fail(path, "protocol values out of range");
    return proto;
}

OttoCycleSpec parse_cycle(const json& c, const UnitSystem& units) {
    const std::string path = "cycle";
    if (!c.is_object()) fail(path, "expected an object");
    reject_unknown(c, path,
                   {"ratio", "t_comp_s", "n_steps", "T_hot_nK", "T_cold_nK",
                    "gamma_per_s", "t_bath_s", "bath_substeps",
                    "snapshot_every", "entanglement_every"});
    OttoCycleSpec spec;
    spec.compression.length_ratio_final = num(c, path, "ratio");
    spec.compression.total_time = units.time_from_s(num(c, path, "t_comp_s"));
    spec.compression.n_steps = integer(c, path, "n_steps");
    spec.expansion = spec.compression;
    spec.expansion.length_ratio_final = 1.0 / spec.compression.length_ratio_final;
    spec.hot_bath.temperature =
        units.temperature_from_nK(num(c, path, "T_hot_nK"));
    spec.cold_bath.temperature =
        units.temperature_from_nK(num(c, path, "T_cold_nK"));
    spec.hot_bath.coupling_gamma = spec.cold_bath.coupling_gamma =
        units.rate_from_per_s(num(c, path, "gamma_per_s"));
    spec.bath_stroke_time = units.time_from_s(num(c, path, "t_bath_s"));
    spec.bath_substeps =
        c.contains("bath_substeps") ? integer(c, path, "bath_substeps") : 50;
    if (c.contains("snapshot_every"))
        spec.snapshot_every = integer(c, path, "snapshot_every");
    if (c.contains("entanglement_every"))
        spec.entanglement_every = integer(c, path, "entanglement_every");
    spec.validate();
    return spec;
}

Scenario::RunOptions parse_run(const json& r) {
    const std::string path = "run";
    if (!r.is_object()) fail(path, "expected an object");
    reject_unknown(r, path,
                   {"output_dir", "seed", "snapshot_every", "gap_tol",
                    "feas_tol"});
    Scenario::RunOptions run;
    if (r.contains("output_dir"))
        run.output_dir = require(r, path, "output_dir").get<std::string>();
    if (r.contains("seed")) run.seed = require(r, path, "seed").get<unsigned>();
    if (r.contains("snapshot_every"))
        run.snapshot_every = integer(r, path, "snapshot_every");
    run.gap_tol = num_or(r, path, "gap_tol", 1e-8);
    run.feas_tol = num_or(r, path, "feas_tol", 1e-8);
    if (run.gap_tol <= 0 || run.feas_tol <= 0 || run.snapshot_every < 0)
        fail(path, "run options out of range");
    return run;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ScenarioError("top level must be an object");
    reject_unknown(root, "$", {"model", "protocol", "cycle", "run"});

    Scenario s{.model = parse_model(require(root, "$", "model")),
               .protocol = std::nullopt,
               .protocol_snapshot_every = 1,
               .cycle = std::nullopt,
               .run = {}};
    if (root.contains("protocol"))
        s.protocol = parse_protocol(root["protocol"], "protocol", s.model.units,
                                    &s.protocol_snapshot_every);
    if (root.contains("cycle")) s.cycle = parse_cycle(root["cycle"], s.model.units);
    if (root.contains("run")) s.run = parse_run(root["run"]);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace bec
