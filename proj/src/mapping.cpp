#include "dualnav/mapping.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include <fmt/format.h>

namespace dualnav {

OccupancyMap::OccupancyMap(GridFrame frame)
    : frame_(frame), cells_(static_cast<std::size_t>(frame.cell_count()), CellState::Unknown) {}

OccupancyMap::OccupancyMap(GridFrame frame, std::vector<CellState> cells)
    : frame_(frame), cells_(std::move(cells)) {
  if (cells_.size() != static_cast<std::size_t>(frame_.cell_count())) {
    throw Error("occupancy map cell count does not match its dimensions");
  }
}

int OccupancyMap::unknown_count() const noexcept {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), CellState::Unknown));
}

void OccupancyMap::apply(const Observation& obs) {
  for (const VisibleCell& v : obs.visible_cells) {
    if (v.index < 0 || v.index >= frame_.cell_count()) {
      throw Error(fmt::format("observed cell {} is outside the map", v.index));
    }
  }
  for (const VisibleCell& v : obs.visible_cells) {
    if (v.state == CellState::Unknown) continue;
    cells_[static_cast<std::size_t>(v.index)] = v.state;
  }
}

OccupancyMap update_occupancy(OccupancyMap map, const Observation& obs) {
  map.apply(obs);
  return map;
}

bool is_frontier_cell(const OccupancyMap& map, int index) noexcept {
  if (!map.is_free(index)) return false;
  const GridFrame& f = map.frame();
  const int c = f.col_of(index);
  const int r = f.row_of(index);
  constexpr int dc[4] = {1, -1, 0, 0};
  constexpr int dr[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int nc = c + dc[k];
    const int nr = r + dr[k];
    if (f.in_bounds(nc, nr) && map.at(nc, nr) == CellState::Unknown) return true;
  }
  return false;
}

std::vector<Frontier> detect_frontiers(const OccupancyMap& map, int min_cluster) {
  const GridFrame& f = map.frame();
  const int n = f.cell_count();
  std::vector<std::uint8_t> is_front(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) is_front[static_cast<std::size_t>(i)] = is_frontier_cell(map, i);

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<Frontier> out;
  std::deque<int> queue;
  for (int seed = 0; seed < n; ++seed) {
    if (!is_front[static_cast<std::size_t>(seed)] || seen[static_cast<std::size_t>(seed)]) continue;
    Frontier fr;
    seen[static_cast<std::size_t>(seed)] = 1;
    queue.push_back(seed);
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      fr.cells.push_back(cur);
      const int c = f.col_of(cur);
      const int r = f.row_of(cur);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (!f.in_bounds(c + dc, r + dr)) continue;
          const int nb = f.index(c + dc, r + dr);
          if (is_front[static_cast<std::size_t>(nb)] && !seen[static_cast<std::size_t>(nb)]) {
            seen[static_cast<std::size_t>(nb)] = 1;
            queue.push_back(nb);
          }
        }
      }
    }
    if (static_cast<int>(fr.cells.size()) < min_cluster) continue;
    std::sort(fr.cells.begin(), fr.cells.end());

    double cx = 0.0;
    double cy = 0.0;
    for (int idx : fr.cells) {
      cx += f.col_of(idx);
      cy += f.row_of(idx);
    }
    cx /= static_cast<double>(fr.cells.size());
    cy /= static_cast<double>(fr.cells.size());
    double best = std::numeric_limits<double>::infinity();
    for (int idx : fr.cells) {
      const double dx = f.col_of(idx) - cx;
      const double dy = f.row_of(idx) - cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        fr.representative_cell = idx;
      }
    }
    fr.representative = f.center(fr.representative_cell);
    out.push_back(std::move(fr));
  }
  std::sort(out.begin(), out.end(), [](const Frontier& a, const Frontier& b) {
    return a.representative_cell < b.representative_cell;
  });
  return out;
}

}  // namespace dualnav
