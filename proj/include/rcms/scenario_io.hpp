#pragma once

#include <map>
#include <utility>
#include <vector>
#include <string>

#include "rcms/sim.hpp"

namespace rcms {

/// Scenario plus the provenance of every resolved config value:
/// "scenario" when the file set it, "paper" or "default" otherwise.
struct LoadedScenario {
    ScenarioSpec spec;
    std::map<std::string, std::string> sources;
};

/// Dotted-key config override, e.g. {"hysteresis.kappa_a", "0.2"}.
using Override = std::pair<std::string, std::string>;

/// Parses a scenario JSON document, applying overrides before resolution.
/// Throws std::runtime_error naming the offending field on malformed input.
LoadedScenario parse_scenario(const std::string& json_text,
                              const std::vector<Override>& overrides = {});

LoadedScenario load_scenario(const std::string& path, const std::vector<Override>& overrides = {});

/// Fully-resolved scenario as JSON (loadable right back as a scenario).
std::string resolved_config_json(const LoadedScenario& scenario,
                                 const std::string& planner_selection);

std::string planner_selection_name(PlannerSelection sel);
PlannerSelection parse_planner_selection(const std::string& name);

}  // namespace rcms
