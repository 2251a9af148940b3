#include "dualnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <fmt/format.h>

namespace dualnav {

double OctileCost::cells() const noexcept {
  return static_cast<double>(straight) + static_cast<double>(diagonal) * std::numbers::sqrt2;
}

int compare(const OctileCost& a, const OctileCost& b) noexcept {
  const std::int64_t ds = a.straight - b.straight;
  const std::int64_t dd = a.diagonal - b.diagonal;
  if (ds >= 0 && dd >= 0) return (ds > 0 || dd > 0) ? 1 : 0;
  if (ds <= 0 && dd <= 0) return -1;
  // Mixed signs: compare |ds| against sqrt(2)|dd| by squaring.
  const std::int64_t s2 = ds * ds;
  const std::int64_t d2 = 2 * dd * dd;
  if (ds > 0) return s2 > d2 ? 1 : -1;
  return d2 > s2 ? 1 : -1;
}

OctileCost octile_heuristic(const GridFrame& f, int from, int to) noexcept {
  const std::int64_t dx = std::abs(f.col_of(from) - f.col_of(to));
  const std::int64_t dy = std::abs(f.row_of(from) - f.row_of(to));
  return {std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy)};
}

namespace {

struct Move {
  int dc;
  int dr;
  bool diagonal;
};

constexpr Move kMoves[8] = {{1, 0, false},  {0, 1, false},  {-1, 0, false}, {0, -1, false},
                            {1, 1, true},   {-1, 1, true},  {-1, -1, true}, {1, -1, true}};

template <typename Fn>
void for_each_neighbor(const GridFrame& f, const std::vector<std::uint8_t>& passable, int cell,
                       Fn&& fn) {
  const int c = f.col_of(cell);
  const int r = f.row_of(cell);
  auto open = [&](int cc, int rr) {
    return f.in_bounds(cc, rr) && passable[static_cast<std::size_t>(f.index(cc, rr))] != 0;
  };
  for (const Move& m : kMoves) {
    const int nc = c + m.dc;
    const int nr = r + m.dr;
    if (!open(nc, nr)) continue;
    if (m.diagonal && (!open(c + m.dc, r) || !open(c, r + m.dr))) continue;
    fn(f.index(nc, nr), m.diagonal);
  }
}

struct OpenEntry {
  OctileCost f;
  OctileCost h;
  int cell;
};

struct OpenGreater {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const noexcept {
    if (int c = compare(a.f, b.f); c != 0) return c > 0;
    if (int c = compare(a.h, b.h); c != 0) return c > 0;
    return a.cell > b.cell;
  }
};

std::vector<Point> compress(const GridFrame& f, const std::vector<int>& cells) {
  std::vector<Point> nodes;
  if (cells.empty()) return nodes;
  nodes.push_back(f.center(cells.front()));
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
    const int dc0 = f.col_of(cells[i]) - f.col_of(cells[i - 1]);
    const int dr0 = f.row_of(cells[i]) - f.row_of(cells[i - 1]);
    const int dc1 = f.col_of(cells[i + 1]) - f.col_of(cells[i]);
    const int dr1 = f.row_of(cells[i + 1]) - f.row_of(cells[i]);
    if (dc0 != dc1 || dr0 != dr1) nodes.push_back(f.center(cells[i]));
  }
  if (cells.size() > 1) nodes.push_back(f.center(cells.back()));
  return nodes;
}

}  // namespace

PlanResult astar_cells(const GridFrame& frame, const std::vector<std::uint8_t>& passable,
                       int start_cell, int target_cell) {
  PlanResult result;
  const int n = frame.cell_count();
  auto ok = [&](int c) { return c >= 0 && c < n && passable[static_cast<std::size_t>(c)] != 0; };
  if (!ok(start_cell)) {
    result.status = PlanStatus::InvalidStart;
    return result;
  }
  if (!ok(target_cell)) {
    result.status = PlanStatus::NoPath;
    return result;
  }

  std::vector<OctileCost> g(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> has_g(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(n), 0);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenGreater> open;

  g[static_cast<std::size_t>(start_cell)] = {};
  has_g[static_cast<std::size_t>(start_cell)] = 1;
  const OctileCost h0 = octile_heuristic(frame, start_cell, target_cell);
  open.push({h0, h0, start_cell});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const auto cu = static_cast<std::size_t>(top.cell);
    if (closed[cu]) continue;
    closed[cu] = 1;
    if (top.cell == target_cell) break;
    for_each_neighbor(frame, passable, top.cell, [&](int nb, bool diagonal) {
      const auto nu = static_cast<std::size_t>(nb);
      if (closed[nu]) return;
      const OctileCost cand = g[cu] + (diagonal ? OctileCost{0, 1} : OctileCost{1, 0});
      if (has_g[nu] && !(cand < g[nu])) return;
      g[nu] = cand;
      has_g[nu] = 1;
      parent[nu] = top.cell;
      const OctileCost h = octile_heuristic(frame, nb, target_cell);
      open.push({cand + h, h, nb});
    });
  }

  if (!closed[static_cast<std::size_t>(target_cell)]) {
    result.status = PlanStatus::NoPath;
    return result;
  }
  std::vector<int> cells;
  for (int c = target_cell; c != -1; c = parent[static_cast<std::size_t>(c)]) cells.push_back(c);
  std::reverse(cells.begin(), cells.end());

  result.status = PlanStatus::Ok;
  result.path.cells = std::move(cells);
  result.path.nodes = compress(frame, result.path.cells);
  result.path.cost_units = g[static_cast<std::size_t>(target_cell)];
  result.path.cost = result.path.cost_units.cells() * frame.resolution;
  return result;
}

std::vector<std::uint8_t> passable_mask(const OccupancyMap& map) {
  std::vector<std::uint8_t> mask(map.cells().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = map.cells()[i] == CellState::Free;
  return mask;
}

std::vector<std::uint8_t> passable_mask(const GroundTruthGrid& grid) {
  std::vector<std::uint8_t> mask(grid.cells().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = grid.cells()[i] == CellState::Free;
  return mask;
}

PlanResult astar(const OccupancyMap& map, Point start, Point target) {
  const GridFrame& f = map.frame();
  const auto s = f.cell_at(start);
  if (!s || !map.is_free(*s)) {
    PlanResult r;
    r.status = PlanStatus::InvalidStart;
    return r;
  }
  const auto t = f.cell_at(target);
  if (!t) return {};
  return astar_cells(f, passable_mask(map), *s, *t);
}

std::vector<double> distance_field(const GridFrame& frame, const std::vector<std::uint8_t>& passable,
                                   int source_cell) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = frame.cell_count();
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  if (source_cell < 0 || source_cell >= n || !passable[static_cast<std::size_t>(source_cell)]) {
    return dist;
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source_cell)] = 0.0;
  pq.push({0.0, source_cell});
  while (!pq.empty()) {
    const auto [d, cell] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(cell)]) continue;
    for_each_neighbor(frame, passable, cell, [&](int nb, bool diagonal) {
      const double nd = d + (diagonal ? std::numbers::sqrt2 : 1.0);
      if (nd < dist[static_cast<std::size_t>(nb)]) {
        dist[static_cast<std::size_t>(nb)] = nd;
        pq.push({nd, nb});
      }
    });
  }
  return dist;
}

double path_length(const std::vector<Point>& pts) noexcept {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

PlannedPath interpolate(const PlannedPath& path, const InterpolationConfig& cfg) {
  if (!(cfg.d > 0.0)) throw Error("interpolation spacing d must be positive");
  PlannedPath out = path;
  out.nodes.clear();
  if (path.nodes.empty()) return out;
  out.nodes.push_back(path.nodes.front());
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    const Point a = path.nodes[i - 1];
    const Point b = path.nodes[i];
    const double len = distance(a, b);
    if (len >= cfg.d) {
      auto pieces = static_cast<long>(std::floor(len / cfg.d)) + 1;
      while (len / static_cast<double>(pieces) >= cfg.d) ++pieces;
      for (long k = 1; k < pieces; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(pieces);
        out.nodes.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
      }
    }
    out.nodes.push_back(b);
  }
  return out;
}

Point project_frontier(const Frontier& f) noexcept { return f.representative; }

}  // namespace dualnav
