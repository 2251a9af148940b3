#include "dualnav/trajectory_log.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/format.h>

#include "dualnav/mapping.hpp"
#include "dualnav/scenario_io.hpp"

namespace dualnav {

namespace {

using ojson = nlohmann::ordered_json;

ojson pose_json(const Pose& p) { return ojson{{"x", p.x}, {"y", p.y}, {"heading", p.heading_deg}}; }

ojson points_json(const std::vector<Point>& pts) {
  auto arr = ojson::array();
  for (const Point& p : pts) arr.push_back(ojson::array({p.x, p.y}));
  return arr;
}

Pose pose_from(const nlohmann::json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<int>()};
}

std::vector<Point> points_from(const nlohmann::json& j) {
  std::vector<Point> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error("point must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

TraceEvent event_from(const nlohmann::json& j) {
  TraceEvent e;
  e.step = j.at("step").get<int>();
  e.fast_step = j.at("fast_step").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  const auto k = parse_event_kind(kind);
  if (!k) throw Error(fmt::format("unknown event kind '{}'", kind));
  e.kind = *k;
  if (j.contains("action")) {
    const std::string name = j.at("action").get<std::string>();
    e.action = parse_action(name);
    if (!e.action) throw Error(fmt::format("unknown action '{}'", name));
  }
  e.pose = pose_from(j.at("pose"));
  e.request_id = j.value("request_id", -1);
  e.detail = j.value("detail", "");
  if (j.contains("choice")) {
    const auto& c = j.at("choice");
    e.choice_index = c.at("index").get<int>();
    e.choice_label = c.at("label").get<std::string>();
    e.reasoning = c.at("reasoning").get<std::string>();
  }
  if (j.contains("frontiers")) e.frontiers = points_from(j.at("frontiers"));
  if (j.contains("plan")) e.plan = points_from(j.at("plan"));
  return e;
}

}  // namespace

bool is_world_step(EventKind kind) noexcept {
  return kind == EventKind::FastAction || kind == EventKind::WaypointStep || kind == EventKind::Stop;
}

std::string format_trajectory_log(const LogHeader& header, const EpisodeResult& result) {
  std::string out;
  ojson h;
  h["type"] = "header";
  h["version"] = 1;
  h["scenario_name"] = header.scenario_name;
  h["seed"] = header.seed;
  h["scenario"] = scenario_to_json(header.spec);
  h["sensor"] = {{"fov_deg", header.sensor.fov_deg}, {"range_m", header.sensor.range_m}};
  h["config"] = header.config;
  out += h.dump();
  out += '\n';
  for (const TraceEvent& e : result.trace.events) {
    ojson j;
    j["type"] = "event";
    j["step"] = e.step;
    j["fast_step"] = e.fast_step;
    j["kind"] = event_kind_name(e.kind);
    if (e.action) j["action"] = action_name(*e.action);
    j["pose"] = pose_json(e.pose);
    if (e.request_id >= 0) j["request_id"] = e.request_id;
    if (!e.detail.empty()) j["detail"] = e.detail;
    if (e.choice_index >= 0) {
      j["choice"] = {{"index", e.choice_index}, {"label", e.choice_label}, {"reasoning", e.reasoning}};
    }
    if (!e.frontiers.empty()) j["frontiers"] = points_json(e.frontiers);
    if (!e.plan.empty()) j["plan"] = points_json(e.plan);
    out += j.dump();
    out += '\n';
  }
  ojson r;
  r["type"] = "result";
  r["success"] = result.success;
  r["stopped"] = result.stopped;
  r["step_count"] = result.step_count;
  r["final_pose"] = pose_json(result.final_pose);
  out += r.dump();
  out += '\n';
  return out;
}

TrajectoryLog parse_trajectory_log(std::istream& in, std::vector<std::string>& warnings, const std::string& source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  TrajectoryLog log;
  bool have_header = false;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    pos = complete ? nl + 1 : text.size();
    ++line_no;
    if (line.empty()) continue;
    if (log.result) throw Error(fmt::format("{}:{}: record after the result record", source, line_no));
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      if (!complete) {
        warnings.push_back(fmt::format("{}:{}: truncated final line ignored", source, line_no));
        break;
      }
      throw Error(fmt::format("{}:{}: malformed JSON record", source, line_no));
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw Error("first record must be the header");
        log.header.scenario_name = j.value("scenario_name", "");
        log.header.seed = j.at("seed").get<std::uint64_t>();
        log.header.spec = scenario_from_json(j.at("scenario"), source);
        log.header.sensor.fov_deg = j.at("sensor").at("fov_deg").get<double>();
        log.header.sensor.range_m = j.at("sensor").at("range_m").get<double>();
        log.header.config = j.value("config", nlohmann::ordered_json::object());
        have_header = true;
      } else if (type == "event") {
        log.events.push_back(event_from(j));
      } else if (type == "result") {
        LogResult r;
        r.success = j.at("success").get<bool>();
        r.stopped = j.at("stopped").get<bool>();
        r.step_count = j.at("step_count").get<int>();
        r.final_pose = pose_from(j.at("final_pose"));
        log.result = r;
      } else {
        throw Error(fmt::format("unknown record type '{}'", type));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(fmt::format("{}:{}: {}", source, line_no, e.what()));
    } catch (const Error& e) {
      throw Error(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  if (!have_header) throw Error(fmt::format("{}: missing header record", source));
  if (!log.result) warnings.push_back(fmt::format("{}: no result record, log is incomplete", source));
  return log;
}

TrajectoryLog read_trajectory_log(const std::filesystem::path& path, std::vector<std::string>& warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  return parse_trajectory_log(in, warnings, path.string());
}

SvgScene scene_from_log(const TrajectoryLog& log) {
  const EpisodeSpec& spec = log.header.spec;
  SvgScene scene;
  scene.map = OccupancyMap(spec.grid.frame());
  scene.goal = spec.goal;
  scene.goal_radius = spec.success_radius;
  scene.map.apply(observe(spec.start, spec.grid, log.header.sensor));
  scene.trajectory.push_back(spec.start.position());
  for (const TraceEvent& e : log.events) {
    if (is_world_step(e.kind)) {
      if (e.kind != EventKind::Stop) scene.map.apply(observe(e.pose, spec.grid, log.header.sensor));
      scene.trajectory.push_back(e.pose.position());
    }
    if (e.kind == EventKind::WaypointBegin && !e.plan.empty()) scene.plans.push_back(e.plan);
  }
  for (const Frontier& f : detect_frontiers(scene.map)) scene.frontiers.push_back(f.representative);
  return scene;
}

}  // namespace dualnav
