#include "dualnav/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace dualnav {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& msg) {
  throw ScenarioError(fmt::format("{}: {}", source, msg));
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view prefix, std::string_view source) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) fail(source, fmt::format("unknown field '{}{}'", prefix, key));
  }
}

const json& require(const json& obj, const char* key, std::string_view prefix,
                    std::string_view source) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(source, fmt::format("missing field '{}{}'", prefix, key));
  return *it;
}

double as_number(const json& v, std::string_view field, std::string_view source) {
  if (!v.is_number()) fail(source, fmt::format("field '{}': expected number", field));
  return v.get<double>();
}

int as_integer(const json& v, std::string_view field, std::string_view source) {
  if (!v.is_number_integer()) fail(source, fmt::format("field '{}': expected integer", field));
  return v.get<int>();
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return fmt::format("line {}, column {}", line, col);
}

}  // namespace

EpisodeSpec scenario_from_json(const json& j, std::string_view source) {
  if (!j.is_object()) fail(source, "top level must be an object");
  reject_unknown(j, {"grid", "resolution_m", "start", "goal", "instruction", "max_steps",
                     "success_radius_m", "reference_path"},
                 "", source);

  const json& grid_j = require(j, "grid", "", source);
  if (!grid_j.is_array()) fail(source, "field 'grid': expected array of strings");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < grid_j.size(); ++i) {
    if (!grid_j[i].is_string()) fail(source, fmt::format("field 'grid[{}]': expected string", i));
    rows.push_back(grid_j[i].get<std::string>());
  }
  const double res = as_number(require(j, "resolution_m", "", source), "resolution_m", source);

  EpisodeSpec spec;
  try {
    spec.grid = GroundTruthGrid::from_rows(rows, res);
  } catch (const Error& e) {
    fail(source, fmt::format("field 'grid': {}", e.what()));
  }

  const json& start = require(j, "start", "", source);
  if (!start.is_object()) fail(source, "field 'start': expected object");
  reject_unknown(start, {"x", "y", "heading"}, "start.", source);
  spec.start.x = as_number(require(start, "x", "start.", source), "start.x", source);
  spec.start.y = as_number(require(start, "y", "start.", source), "start.y", source);
  spec.start.heading_deg =
      as_integer(require(start, "heading", "start.", source), "start.heading", source);

  const json& goal = require(j, "goal", "", source);
  if (!goal.is_object()) fail(source, "field 'goal': expected object");
  reject_unknown(goal, {"x", "y"}, "goal.", source);
  spec.goal.x = as_number(require(goal, "x", "goal.", source), "goal.x", source);
  spec.goal.y = as_number(require(goal, "y", "goal.", source), "goal.y", source);

  const json& instr = require(j, "instruction", "", source);
  if (!instr.is_string()) fail(source, "field 'instruction': expected string");
  spec.instruction = instr.get<std::string>();

  if (auto it = j.find("max_steps"); it != j.end()) {
    spec.max_steps = as_integer(*it, "max_steps", source);
  }
  if (auto it = j.find("success_radius_m"); it != j.end()) {
    spec.success_radius = as_number(*it, "success_radius_m", source);
  }
  if (auto it = j.find("reference_path"); it != j.end()) {
    if (!it->is_array()) fail(source, "field 'reference_path': expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& p = (*it)[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail(source, fmt::format("field 'reference_path[{}]': expected [x, y]", i));
      }
      spec.reference_path.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }

  try {
    validate(spec);
  } catch (const Error& e) {
    fail(source, e.what());
  }
  return spec;
}

EpisodeSpec parse_scenario(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, fmt::format("parse error at {}: {}", line_col(text, e.byte ? e.byte - 1 : 0),
                             e.what()));
  }
  return scenario_from_json(j, source);
}

EpisodeSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(fmt::format("{}: cannot open file", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

nlohmann::ordered_json scenario_to_json(const EpisodeSpec& spec) {
  nlohmann::ordered_json j;
  j["grid"] = spec.grid.to_rows();
  j["resolution_m"] = spec.grid.frame().resolution;
  j["start"] = {{"x", spec.start.x}, {"y", spec.start.y}, {"heading", spec.start.heading_deg}};
  j["goal"] = {{"x", spec.goal.x}, {"y", spec.goal.y}};
  j["instruction"] = spec.instruction;
  j["max_steps"] = spec.max_steps;
  j["success_radius_m"] = spec.success_radius;
  if (!spec.reference_path.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const Point& p : spec.reference_path) arr.push_back({p.x, p.y});
    j["reference_path"] = std::move(arr);
  }
  return j;
}

std::string scenario_to_string(const EpisodeSpec& spec) {
  return scenario_to_json(spec).dump(2) + "\n";
}

void save_scenario(const EpisodeSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ScenarioError(fmt::format("{}: cannot write file", path.string()));
  out << scenario_to_string(spec);
}

}  // namespace dualnav
