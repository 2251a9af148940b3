#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualnav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;

enum class Action : std::uint8_t { MoveForward, TurnLeft, TurnRight, Stop };

inline constexpr std::array<Action, 4> kAllActions{Action::MoveForward, Action::TurnLeft,
                                                   Action::TurnRight, Action::Stop};
inline constexpr double kForwardStepM = 0.25;
inline constexpr int kTurnStepDeg = 15;

std::string_view action_name(Action a) noexcept;
std::optional<Action> parse_action(std::string_view name) noexcept;

// Heading in degrees, always a multiple of 15 in [0, 360). 0 is +x and angles
// grow counterclockwise.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  int heading_deg = 0;

  Point position() const noexcept { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

int normalize_heading(int deg) noexcept;
bool valid_heading(int deg) noexcept;
// Unit vector for a heading; exact for multiples of 90 degrees.
Point heading_vector(int heading_deg) noexcept;
// Multiple of 15 closest to `deg` (any real angle), normalized.
int snap_heading(double deg) noexcept;
// Signed smallest difference to - from in degrees, in (-180, 180].
double heading_delta(double from_deg, double to_deg) noexcept;

// Pure kinematics, ignoring obstacles.
Pose advance(const Pose& pose, Action action) noexcept;

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// Geometry of a cell lattice. Cell (col, row) has its center at
// (col * resolution, row * resolution); a point belongs to the cell whose
// center is nearest (coordinate rounding).
struct GridFrame {
  int width = 0;
  int height = 0;
  double resolution = 0.25;

  int cell_count() const noexcept { return width * height; }
  bool in_bounds(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width && row < height;
  }
  int index(int col, int row) const noexcept { return row * width + col; }
  int col_of(int index) const noexcept { return index % width; }
  int row_of(int index) const noexcept { return index / width; }
  Point center(int index) const noexcept {
    return {col_of(index) * resolution, row_of(index) * resolution};
  }
  int coord(double meters) const noexcept;
  // Index of the cell containing `p`, or nullopt when outside the grid.
  std::optional<int> cell_at(Point p) const noexcept;

  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

// Walled ground-truth world: only Free and Occupied, border cells occupied.
class GroundTruthGrid {
 public:
  GroundTruthGrid() = default;
  GroundTruthGrid(GridFrame frame, std::vector<CellState> cells);

  const GridFrame& frame() const noexcept { return frame_; }
  const std::vector<CellState>& cells() const noexcept { return cells_; }
  CellState at(int index) const { return cells_.at(static_cast<std::size_t>(index)); }
  bool is_free(int index) const noexcept {
    return index >= 0 && index < frame_.cell_count() &&
           cells_[static_cast<std::size_t>(index)] == CellState::Free;
  }
  bool is_free_at(Point p) const noexcept;

  // Row strings using '#' for occupied and '.' for free, row 0 first.
  std::vector<std::string> to_rows() const;
  static GroundTruthGrid from_rows(const std::vector<std::string>& rows, double resolution);

 private:
  GridFrame frame_;
  std::vector<CellState> cells_;
};

struct EpisodeSpec {
  GroundTruthGrid grid;
  Pose start;
  Point goal;
  std::string instruction;
  int max_steps = 500;
  double success_radius = 3.0;
  // Annotated reference path for nDTW; empty means "use the geodesic".
  std::vector<Point> reference_path;
};

void validate(const EpisodeSpec& spec);

struct AgentState {
  Pose pose;
  int steps = 0;
  bool collided = false;  // set by the most recent MoveForward when blocked
  bool stopped = false;
};

AgentState initial_state(const EpisodeSpec& spec) noexcept;

// One simulator transition. Blocked moves leave the position unchanged and
// set `collided`. Throws Error when the agent has already stopped.
AgentState step(const AgentState& state, Action action, const GroundTruthGrid& grid);

bool is_terminated(const AgentState& state, const EpisodeSpec& spec) noexcept;

// Stop issued, within the success radius, and inside the step budget.
// Throws Error if the episode has not terminated yet.
bool is_success(const AgentState& state, const EpisodeSpec& spec);

struct SensorConfig {
  double fov_deg = 90.0;
  double range_m = 5.0;
};

struct VisibleCell {
  int index = 0;
  CellState state = CellState::Unknown;
  friend bool operator==(const VisibleCell&, const VisibleCell&) = default;
};

struct Observation {
  Pose pose;
  std::vector<VisibleCell> visible_cells;  // sorted by index
};

// A cell is visible when its center lies inside the sensor sector and the
// straight segment from the agent to that center crosses no occupied cell
// other than the target itself. The agent's own cell is always visible.
Observation observe(const Pose& pose, const GroundTruthGrid& grid, const SensorConfig& sensor);

}  // namespace dualnav
