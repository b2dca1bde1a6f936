#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relmech/config.hpp"

namespace relmech {

struct RunSummary {
    ScenarioKind scenario = ScenarioKind::InvariantSuite;
    int steps = 0;               // integration steps executed, when meaningful
    std::string metric_name;     // headline figure for this scenario kind
    double metric_value = 0.0;
    std::vector<std::string> artifacts;  // files written, in write order
    bool pass = true;            // false only for failed check batteries
};

// Executes one configured scenario end to end: integrates, sweeps, or
// evolves, writes the scenario's artifacts under the configured output
// directory, and prints a deterministic report to `log` (fixed float
// formatting, no timing, no machine-specific content). Numerical failures
// surface as typed exceptions; `pass` reflects check outcomes only.
RunSummary run_scenario(const ScenarioConfig& cfg, std::ostream& log);

}  // namespace relmech
