#pragma once

#include <cstdint>
#include <vector>

#include "dualnav/mapping.hpp"
#include "dualnav/world.hpp"

namespace dualnav {

// Path cost on the 8-connected lattice: straight + diagonal * sqrt(2) cells.
// Comparisons are exact (sqrt(2) is irrational, so equal values have equal
// components).
struct OctileCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  double cells() const noexcept;
  OctileCost operator+(const OctileCost& o) const noexcept {
    return {straight + o.straight, diagonal + o.diagonal};
  }
  friend bool operator==(const OctileCost&, const OctileCost&) = default;
};

// Sign of (a - b): -1, 0 or +1, computed in integers.
int compare(const OctileCost& a, const OctileCost& b) noexcept;
inline bool operator<(const OctileCost& a, const OctileCost& b) noexcept { return compare(a, b) < 0; }

OctileCost octile_heuristic(const GridFrame& f, int from, int to) noexcept;

struct PlannedPath {
  std::vector<Point> nodes;  // turning points, first = start, last = target
  std::vector<int> cells;    // every lattice cell visited, in order
  OctileCost cost_units;
  double cost = 0.0;         // meters
};

enum class PlanStatus { Ok, NoPath, InvalidStart };

struct PlanResult {
  PlanStatus status = PlanStatus::NoPath;
  PlannedPath path;
  explicit operator bool() const noexcept { return status == PlanStatus::Ok; }
};

// A* over a passability mask (1 = traversable). Straight cost 1, diagonal
// sqrt(2), octile heuristic, no diagonal move past a blocked orthogonal
// neighbour. Open-list order: lower f, then lower h, then lower cell index.
PlanResult astar_cells(const GridFrame& frame, const std::vector<std::uint8_t>& passable,
                       int start_cell, int target_cell);

// Planning on the belief map: only Free cells are traversable. Endpoints are
// snapped to the centers of the cells containing them.
PlanResult astar(const OccupancyMap& map, Point start, Point target);

std::vector<std::uint8_t> passable_mask(const OccupancyMap& map);
std::vector<std::uint8_t> passable_mask(const GroundTruthGrid& grid);

// Single-source shortest path lengths in cells under the same move rules;
// +inf for unreachable cells.
std::vector<double> distance_field(const GridFrame& frame, const std::vector<std::uint8_t>& passable,
                                   int source_cell);

struct InterpolationConfig {
  double d = 0.5;  // meters, strict upper bound on spacing
};

// Inserts evenly spaced points so every consecutive spacing is < d. A segment
// of length L >= d is split into floor(L / d) + 1 equal pieces.
PlannedPath interpolate(const PlannedPath& path, const InterpolationConfig& cfg);

double path_length(const std::vector<Point>& pts) noexcept;

// Identity lift of a frontier onto the planning frame.
Point project_frontier(const Frontier& f) noexcept;

}  // namespace dualnav
