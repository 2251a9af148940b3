#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualnav/render.hpp"
#include "dualnav/trace.hpp"
#include "dualnav/world.hpp"

namespace dualnav {

// JSON lines, one record per line:
//   {"type":"header","version":1,"scenario_name":str,"seed":int,
//    "scenario":{...scenario file...},"sensor":{"fov_deg":num,"range_m":num},"config":{...}}
//   {"type":"event","step":int,"fast_step":int,"kind":str,"action":str?,
//    "pose":{"x":num,"y":num,"heading":int},"request_id":int?,"detail":str?,
//    "choice":{"index":int,"label":str,"reasoning":str}?,
//    "frontiers":[[x,y],...]?,"plan":[[x,y],...]?}
//   {"type":"result","success":bool,"stopped":bool,"step_count":int,
//    "final_pose":{"x":num,"y":num,"heading":int}}
// Wall time is deliberately absent so logs of identical runs are identical.

struct LogHeader {
  std::string scenario_name;
  std::uint64_t seed = 0;
  EpisodeSpec spec;
  SensorConfig sensor;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

struct LogResult {
  bool success = false;
  bool stopped = false;
  int step_count = 0;
  Pose final_pose;
};

struct TrajectoryLog {
  LogHeader header;
  std::vector<TraceEvent> events;
  std::optional<LogResult> result;  // absent in truncated logs
};

std::string format_trajectory_log(const LogHeader& header, const EpisodeResult& result);

// Throws Error("<source>:<line>: ...") for a malformed line. A final line
// that is cut off (no trailing newline) is dropped with a warning instead.
TrajectoryLog parse_trajectory_log(std::istream& in, std::vector<std::string>& warnings,
                                   const std::string& source = "<log>");
TrajectoryLog read_trajectory_log(const std::filesystem::path& path, std::vector<std::string>& warnings);

// True for events that correspond to one world step.
bool is_world_step(EventKind kind) noexcept;

// Rebuilds the belief map by replaying observations at every logged pose,
// and collects plans and the executed trajectory.
SvgScene scene_from_log(const TrajectoryLog& log);

}  // namespace dualnav
