#pragma once

#include <vector>

#include "dualnav/world.hpp"

namespace dualnav {

// Incrementally built 2D belief over the ground-truth lattice.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  explicit OccupancyMap(GridFrame frame);
  OccupancyMap(GridFrame frame, std::vector<CellState> cells);

  const GridFrame& frame() const noexcept { return frame_; }
  const std::vector<CellState>& cells() const noexcept { return cells_; }
  CellState at(int index) const { return cells_.at(static_cast<std::size_t>(index)); }
  CellState at(int col, int row) const noexcept {
    return frame_.in_bounds(col, row) ? cells_[static_cast<std::size_t>(frame_.index(col, row))]
                                      : CellState::Unknown;
  }
  bool is_free(int index) const noexcept {
    return index >= 0 && index < frame_.cell_count() &&
           cells_[static_cast<std::size_t>(index)] == CellState::Free;
  }
  int unknown_count() const noexcept;

  // In-place form of update_occupancy. Throws Error on an out-of-bounds index.
  void apply(const Observation& obs);

  friend bool operator==(const OccupancyMap&, const OccupancyMap&) = default;

 private:
  GridFrame frame_;
  std::vector<CellState> cells_;
};

OccupancyMap update_occupancy(OccupancyMap map, const Observation& obs);

struct Frontier {
  std::vector<int> cells;  // ascending cell indices
  int representative_cell = 0;
  Point representative;
};

// Free cell with at least one 4-neighbour that is unknown (off-grid
// neighbours do not count).
bool is_frontier_cell(const OccupancyMap& map, int index) noexcept;

// 8-connected clusters of frontier cells with at least `min_cluster` members.
// Representative is the member nearest the cluster centroid (lowest index on
// ties); the list is ordered by representative index.
std::vector<Frontier> detect_frontiers(const OccupancyMap& map, int min_cluster = 2);

}  // namespace dualnav
