#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dualnav/world.hpp"

namespace dualnav {

// Scenario file (JSON, strict):
//   grid              array of strings, '#' occupied, '.' free, row 0 = y 0
//   resolution_m      number > 0
//   start             {x, y, heading}   meters, degrees
//   goal              {x, y}            meters
//   instruction       string
//   max_steps         optional integer, default 500
//   success_radius_m  optional number, default 3.0
//   reference_path    optional [[x, y], ...] overriding the geodesic for nDTW
// Unknown fields at any level are rejected.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

EpisodeSpec parse_scenario(std::string_view text, std::string_view source = "<scenario>");
EpisodeSpec scenario_from_json(const nlohmann::json& j, std::string_view source = "<scenario>");
EpisodeSpec load_scenario(const std::filesystem::path& path);

nlohmann::ordered_json scenario_to_json(const EpisodeSpec& spec);
// Pretty-printed, newline-terminated; stable byte output for a given spec.
std::string scenario_to_string(const EpisodeSpec& spec);
void save_scenario(const EpisodeSpec& spec, const std::filesystem::path& path);

}  // namespace dualnav
