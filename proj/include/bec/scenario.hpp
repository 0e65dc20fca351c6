#pragma once

#include <optional>
#include <string>

#include "bec/bath.hpp"

namespace bec {

// Parsed and unit-converted scenario file. Sections: "model" (required),
// "protocol" and "cycle" (optional, needed by the respective drivers), "run".
// Unknown keys anywhere are rejected with the offending JSON path.
struct Scenario {
    ConvertedScenario model;
    std::optional<CompressionProtocol> protocol;
    int protocol_snapshot_every = 1;
    std::optional<OttoCycleSpec> cycle;

    struct RunOptions {
        std::string output_dir = ".";
        unsigned seed = 0;
        int snapshot_every = 1;
        double gap_tol = 1e-8;
        double feas_tol = 1e-8;
    };
    RunOptions run;
};

Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace bec
