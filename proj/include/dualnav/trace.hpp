#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualnav/world.hpp"

namespace dualnav {

enum class EventKind {
  FastAction,
  SlowRequest,
  SlowArrival,
  WaypointBegin,
  WaypointStep,
  WaypointEnd,
  Fallback,
  Stop,
};

std::string_view event_kind_name(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

struct TraceEvent {
  int step = 0;       // world steps taken when the event was recorded
  int fast_step = 0;  // fast-policy actions taken so far
  EventKind kind = EventKind::FastAction;
  std::optional<Action> action;
  Pose pose;           // pose after the event
  int request_id = -1; // slow_request / slow_arrival / fallback pairing
  std::string detail;
  // slow_arrival / fallback payload
  int choice_index = -1;
  std::string choice_label;
  std::string reasoning;
  std::vector<Point> frontiers;  // candidate representatives
  std::vector<Point> plan;       // path to the chosen frontier
};

struct ScheduleTrace {
  std::vector<TraceEvent> events;

  int count(EventKind k) const noexcept;
};

struct EpisodeResult {
  bool success = false;
  bool stopped = false;
  Pose final_pose;
  int step_count = 0;
  std::vector<Point> path;  // step_count + 1 positions
  double wall_time = 0.0;   // seconds
  ScheduleTrace trace;
};

}  // namespace dualnav
