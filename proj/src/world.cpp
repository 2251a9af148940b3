#include "dualnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace dualnav {

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view action_name(Action a) noexcept {
  switch (a) {
    case Action::MoveForward: return "MoveForward";
    case Action::TurnLeft: return "TurnLeft";
    case Action::TurnRight: return "TurnRight";
    case Action::Stop: return "Stop";
  }
  return "Stop";
}

std::optional<Action> parse_action(std::string_view name) noexcept {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  return std::nullopt;
}

int normalize_heading(int deg) noexcept {
  int h = deg % 360;
  return h < 0 ? h + 360 : h;
}

bool valid_heading(int deg) noexcept { return deg >= 0 && deg < 360 && deg % kTurnStepDeg == 0; }

Point heading_vector(int heading_deg) noexcept {
  switch (normalize_heading(heading_deg)) {
    case 0: return {1.0, 0.0};
    case 90: return {0.0, 1.0};
    case 180: return {-1.0, 0.0};
    case 270: return {0.0, -1.0};
    default: break;
  }
  const double rad = heading_deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

int snap_heading(double deg) noexcept {
  const long steps = std::lround(deg / kTurnStepDeg);
  return normalize_heading(static_cast<int>(steps % 24) * kTurnStepDeg);
}

double heading_delta(double from_deg, double to_deg) noexcept {
  double d = std::fmod(to_deg - from_deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

Pose advance(const Pose& pose, Action action) noexcept {
  Pose next = pose;
  switch (action) {
    case Action::TurnLeft:
      next.heading_deg = normalize_heading(pose.heading_deg + kTurnStepDeg);
      break;
    case Action::TurnRight:
      next.heading_deg = normalize_heading(pose.heading_deg - kTurnStepDeg);
      break;
    case Action::MoveForward: {
      const Point dir = heading_vector(pose.heading_deg);
      next.x = pose.x + kForwardStepM * dir.x;
      next.y = pose.y + kForwardStepM * dir.y;
      break;
    }
    case Action::Stop:
      break;
  }
  return next;
}

int GridFrame::coord(double meters) const noexcept {
  return static_cast<int>(std::floor(meters / resolution + 0.5));
}

std::optional<int> GridFrame::cell_at(Point p) const noexcept {
  const int c = coord(p.x);
  const int r = coord(p.y);
  if (!in_bounds(c, r)) return std::nullopt;
  return index(c, r);
}

GroundTruthGrid::GroundTruthGrid(GridFrame frame, std::vector<CellState> cells)
    : frame_(frame), cells_(std::move(cells)) {
  if (!(frame_.resolution > 0.0)) throw Error("grid resolution must be positive");
  if (frame_.width < 1 || frame_.height < 1) throw Error("grid must be non-empty");
  if (cells_.size() != static_cast<std::size_t>(frame_.cell_count())) {
    throw Error("grid cell count does not match its dimensions");
  }
  for (CellState s : cells_) {
    if (s == CellState::Unknown) throw Error("ground-truth cells must be free or occupied");
  }
  for (int r = 0; r < frame_.height; ++r) {
    for (int c = 0; c < frame_.width; ++c) {
      const bool border = r == 0 || c == 0 || r == frame_.height - 1 || c == frame_.width - 1;
      if (border && cells_[static_cast<std::size_t>(frame_.index(c, r))] != CellState::Occupied) {
        throw Error(fmt::format("boundary cell ({}, {}) must be occupied", c, r));
      }
    }
  }
}

bool GroundTruthGrid::is_free_at(Point p) const noexcept {
  const auto idx = frame_.cell_at(p);
  return idx && is_free(*idx);
}

std::vector<std::string> GroundTruthGrid::to_rows() const {
  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(frame_.height));
  for (int r = 0; r < frame_.height; ++r) {
    std::string row;
    row.reserve(static_cast<std::size_t>(frame_.width));
    for (int c = 0; c < frame_.width; ++c) {
      row.push_back(cells_[static_cast<std::size_t>(frame_.index(c, r))] == CellState::Free ? '.' : '#');
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

GroundTruthGrid GroundTruthGrid::from_rows(const std::vector<std::string>& rows, double resolution) {
  if (rows.empty()) throw Error("grid has no rows");
  const std::size_t width = rows.front().size();
  std::vector<CellState> cells;
  cells.reserve(width * rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(fmt::format("grid row {} has length {}, expected {}", r, rows[r].size(), width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const char ch = rows[r][c];
      if (ch == '.') {
        cells.push_back(CellState::Free);
      } else if (ch == '#') {
        cells.push_back(CellState::Occupied);
      } else {
        throw Error(fmt::format("grid row {} column {}: unexpected character '{}'", r, c, ch));
      }
    }
  }
  GridFrame frame{static_cast<int>(width), static_cast<int>(rows.size()), resolution};
  return GroundTruthGrid(frame, std::move(cells));
}

void validate(const EpisodeSpec& spec) {
  if (!valid_heading(spec.start.heading_deg)) {
    throw Error(fmt::format("start heading {} is not a multiple of 15 in [0, 360)",
                            spec.start.heading_deg));
  }
  if (!spec.grid.is_free_at(spec.start.position())) throw Error("start not free");
  if (!spec.grid.is_free_at(spec.goal)) throw Error("goal not free");
  if (spec.max_steps < 1) throw Error("max_steps must be at least 1");
  if (!(spec.success_radius > 0.0)) throw Error("success_radius_m must be positive");
}

AgentState initial_state(const EpisodeSpec& spec) noexcept {
  AgentState s;
  s.pose = spec.start;
  return s;
}

AgentState step(const AgentState& state, Action action, const GroundTruthGrid& grid) {
  if (state.stopped) throw Error("step called after Stop");
  AgentState next = state;
  next.steps += 1;
  next.collided = false;
  switch (action) {
    case Action::Stop:
      next.stopped = true;
      break;
    case Action::MoveForward: {
      const Pose moved = advance(state.pose, action);
      if (grid.is_free_at(moved.position())) {
        next.pose = moved;
      } else {
        next.collided = true;
      }
      break;
    }
    default:
      next.pose = advance(state.pose, action);
      break;
  }
  return next;
}

bool is_terminated(const AgentState& state, const EpisodeSpec& spec) noexcept {
  return state.stopped || state.steps >= spec.max_steps;
}

bool is_success(const AgentState& state, const EpisodeSpec& spec) {
  if (!is_terminated(state, spec)) throw Error("is_success called before the episode terminated");
  return state.stopped && state.steps <= spec.max_steps &&
         distance(state.pose.position(), spec.goal) <= spec.success_radius;
}

namespace {

// Amanatides-Woo traversal in cell units; returns false if an occupied cell
// other than the target is crossed.
bool line_of_sight(const GroundTruthGrid& grid, double u0, double v0, int target_col,
                   int target_row) {
  const GridFrame& f = grid.frame();
  int col = static_cast<int>(std::floor(u0 + 0.5));
  int row = static_cast<int>(std::floor(v0 + 0.5));
  const double du = target_col - u0;
  const double dv = target_row - v0;
  const int step_c = du > 0 ? 1 : (du < 0 ? -1 : 0);
  const int step_r = dv > 0 ? 1 : (dv < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double t_delta_c = step_c != 0 ? std::abs(1.0 / du) : kInf;
  const double t_delta_r = step_r != 0 ? std::abs(1.0 / dv) : kInf;
  double t_max_c = kInf;
  double t_max_r = kInf;
  if (step_c > 0) t_max_c = ((col + 0.5) - u0) / du;
  if (step_c < 0) t_max_c = ((col - 0.5) - u0) / du;
  if (step_r > 0) t_max_r = ((row + 0.5) - v0) / dv;
  if (step_r < 0) t_max_r = ((row - 0.5) - v0) / dv;

  while (col != target_col || row != target_row) {
    // The segment ends at the target center, so leaving past t = 1 only
    // happens through rounding.
    if (std::min(t_max_c, t_max_r) > 1.0) return true;
    if (t_max_c < t_max_r) {
      col += step_c;
      t_max_c += t_delta_c;
    } else if (t_max_r < t_max_c) {
      row += step_r;
      t_max_r += t_delta_r;
    } else {
      col += step_c;
      row += step_r;
      t_max_c += t_delta_c;
      t_max_r += t_delta_r;
    }
    if (col == target_col && row == target_row) break;
    if (!f.in_bounds(col, row)) return false;
    if (grid.at(f.index(col, row)) == CellState::Occupied) return false;
  }
  return true;
}

}  // namespace

Observation observe(const Pose& pose, const GroundTruthGrid& grid, const SensorConfig& sensor) {
  const GridFrame& f = grid.frame();
  Observation obs;
  obs.pose = pose;
  const double res = f.resolution;
  const double u0 = pose.x / res;
  const double v0 = pose.y / res;
  const int agent_col = f.coord(pose.x);
  const int agent_row = f.coord(pose.y);
  const double range_cells = sensor.range_m / res;
  const double half_fov = sensor.fov_deg / 2.0;
  const double heading = pose.heading_deg;

  const int c_lo = std::max(0, static_cast<int>(std::floor(u0 - range_cells)));
  const int c_hi = std::min(f.width - 1, static_cast<int>(std::ceil(u0 + range_cells)));
  const int r_lo = std::max(0, static_cast<int>(std::floor(v0 - range_cells)));
  const int r_hi = std::min(f.height - 1, static_cast<int>(std::ceil(v0 + range_cells)));

  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const int idx = f.index(c, r);
      if (c == agent_col && r == agent_row) {
        obs.visible_cells.push_back({idx, grid.at(idx)});
        continue;
      }
      const double du = c - u0;
      const double dv = r - v0;
      if (std::hypot(du, dv) > range_cells) continue;
      const double bearing = std::atan2(dv, du) * 180.0 / std::numbers::pi;
      if (std::abs(heading_delta(heading, bearing)) > half_fov + 1e-9) continue;
      if (!line_of_sight(grid, u0, v0, c, r)) continue;
      obs.visible_cells.push_back({idx, grid.at(idx)});
    }
  }
  return obs;
}

}  // namespace dualnav
