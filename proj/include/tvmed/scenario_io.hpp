#pragma once

#include "tvmed/simulation.hpp"

#include <json.hpp>

namespace tvmed {

/// Scenario files are JSON objects. An optional "model": "i" | "ii" key seeds
/// the built-in scenario; every other key overrides a field. Coefficient
/// functions are expression strings in t (numbers are accepted as constants).
nlohmann::json scenario_to_json(const SimScenario& scenario);
SimScenario scenario_from_json(const nlohmann::json& j);
SimScenario load_scenario_file(const std::string& path);

}  // namespace tvmed
