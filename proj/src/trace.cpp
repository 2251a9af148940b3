#include "dualnav/trace.hpp"

#include <algorithm>

namespace dualnav {

std::string_view event_kind_name(EventKind k) noexcept {
  switch (k) {
    case EventKind::FastAction: return "fast_action";
    case EventKind::SlowRequest: return "slow_request";
    case EventKind::SlowArrival: return "slow_arrival";
    case EventKind::WaypointBegin: return "waypoint_begin";
    case EventKind::WaypointStep: return "waypoint_step";
    case EventKind::WaypointEnd: return "waypoint_end";
    case EventKind::Fallback: return "fallback";
    case EventKind::Stop: return "stop";
  }
  return "stop";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(EventKind::Stop); ++i) {
    const auto k = static_cast<EventKind>(i);
    if (event_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

int ScheduleTrace::count(EventKind k) const noexcept {
  return static_cast<int>(std::count_if(events.begin(), events.end(),
                                        [k](const TraceEvent& e) { return e.kind == k; }));
}

}  // namespace dualnav
