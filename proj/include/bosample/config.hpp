#pragma once

#include <map>
#include <string>

#include "bosample/simulation.hpp"

namespace bosample {

// Flat key = value simulation config ('#' comments, blank lines ignored).
// Unknown keys are rejected. parse_simulation_config applies the file first,
// then `overrides` (e.g. from CLI flags) take precedence.
SimulationConfig parse_simulation_config(const std::string& path,
                                         const std::map<std::string, std::string>& overrides = {});

SimulationConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

// Canonical flat text echo of a config (sorted keys); hashed for provenance.
std::string config_echo(const SimulationConfig& config);
std::uint64_t fnv1a_hash(const std::string& text);

// Full summary document: per-design five-number statistics per metric, the
// p-value matrix against the SRS baseline, and a provenance block.
std::string summary_json(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& timestamp);

} // namespace bosample
