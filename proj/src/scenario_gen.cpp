#include "dualnav/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/format.h>

#include "dualnav/planner.hpp"
#include "dualnav/random.hpp"

namespace dualnav {

bool is_junction_cell(const GroundTruthGrid& grid, int index) noexcept {
  if (!grid.is_free(index)) return false;
  const GridFrame& f = grid.frame();
  const int c = f.col_of(index);
  const int r = f.row_of(index);
  int n = 0;
  n += f.in_bounds(c + 1, r) && grid.is_free(f.index(c + 1, r));
  n += f.in_bounds(c - 1, r) && grid.is_free(f.index(c - 1, r));
  n += f.in_bounds(c, r + 1) && grid.is_free(f.index(c, r + 1));
  n += f.in_bounds(c, r - 1) && grid.is_free(f.index(c, r - 1));
  return n >= 3;
}

int count_junctions(const GroundTruthGrid& grid) {
  const GridFrame& f = grid.frame();
  const int n = f.cell_count();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  int clusters = 0;
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)] || !is_junction_cell(grid, i)) continue;
    ++clusters;
    seen[static_cast<std::size_t>(i)] = 1;
    queue.push_back(i);
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nc = f.col_of(cur) + dc;
          const int nr = f.row_of(cur) + dr;
          if (!f.in_bounds(nc, nr)) continue;
          const int nb = f.index(nc, nr);
          if (!seen[static_cast<std::size_t>(nb)] && is_junction_cell(grid, nb)) {
            seen[static_cast<std::size_t>(nb)] = 1;
            queue.push_back(nb);
          }
        }
      }
    }
  }
  return clusters;
}

namespace {

constexpr int kDirI[4] = {1, 0, -1, 0};
constexpr int kDirJ[4] = {0, 1, 0, -1};

struct Lattice {
  int nodes = 0;  // per side
  int pitch = 0;
  int width = 0;  // corridor width
  int size = 0;   // cells per side
  std::vector<CellState> cells;

  int node_id(int i, int j) const { return j * nodes + i; }
  int cell_of_node(int id) const {
    const int i = id % nodes;
    const int j = id / nodes;
    return (1 + j * pitch) * size + (1 + i * pitch);
  }
  void carve_node(int id) {
    const int i = id % nodes;
    const int j = id / nodes;
    for (int r = 0; r < width; ++r) {
      for (int c = 0; c < width; ++c) {
        cells[static_cast<std::size_t>((1 + j * pitch + r) * size + 1 + i * pitch + c)] = CellState::Free;
      }
    }
  }
  // Opens the wall strip between two 4-adjacent nodes.
  void carve_edge(int a, int b) {
    carve_node(a);
    carve_node(b);
    const int ia = a % nodes, ja = a / nodes, ib = b % nodes, jb = b / nodes;
    const int i0 = std::min(ia, ib), j0 = std::min(ja, jb);
    if (ia != ib) {
      const int col = 1 + i0 * pitch + width;
      for (int r = 0; r < width; ++r) {
        cells[static_cast<std::size_t>((1 + j0 * pitch + r) * size + col)] = CellState::Free;
      }
    } else {
      const int row = 1 + j0 * pitch + width;
      for (int c = 0; c < width; ++c) {
        cells[static_cast<std::size_t>(row * size + 1 + i0 * pitch + c)] = CellState::Free;
      }
    }
  }
  // Opens the wall corner between a 2x2 block of nodes (room interior).
  void carve_block_center(int i0, int j0) {
    const int row = 1 + j0 * pitch + width;
    const int col = 1 + i0 * pitch + width;
    cells[static_cast<std::size_t>(row * size + col)] = CellState::Free;
  }
};

std::vector<int> free_neighbors(const Lattice& lat, const std::vector<std::uint8_t>& used, int id) {
  std::vector<int> out;
  const int i = id % lat.nodes;
  const int j = id / lat.nodes;
  for (int d = 0; d < 4; ++d) {
    const int ni = i + kDirI[d];
    const int nj = j + kDirJ[d];
    if (ni < 0 || nj < 0 || ni >= lat.nodes || nj >= lat.nodes) continue;
    const int nb = lat.node_id(ni, nj);
    if (!used[static_cast<std::size_t>(nb)]) out.push_back(nb);
  }
  return out;
}

// Self-avoiding walk that prefers to keep its direction.
std::vector<int> random_walk(Rng& rng, const Lattice& lat, std::vector<std::uint8_t>& used, int start,
                             int max_len) {
  std::vector<int> walk{start};
  used[static_cast<std::size_t>(start)] = 1;
  int prev_dir = -1;
  while (static_cast<int>(walk.size()) < max_len) {
    const auto options = free_neighbors(lat, used, walk.back());
    if (options.empty()) break;
    int next = options[uniform_index(rng, options.size())];
    if (prev_dir >= 0 && uniform01(rng) < 0.5) {
      const int i = walk.back() % lat.nodes + kDirI[prev_dir];
      const int j = walk.back() / lat.nodes + kDirJ[prev_dir];
      if (i >= 0 && j >= 0 && i < lat.nodes && j < lat.nodes) {
        const int straight = lat.node_id(i, j);
        if (std::find(options.begin(), options.end(), straight) != options.end()) next = straight;
      }
    }
    const int di = next % lat.nodes - walk.back() % lat.nodes;
    const int dj = next / lat.nodes - walk.back() / lat.nodes;
    for (int d = 0; d < 4; ++d) {
      if (kDirI[d] == di && kDirJ[d] == dj) prev_dir = d;
    }
    used[static_cast<std::size_t>(next)] = 1;
    walk.push_back(next);
  }
  return walk;
}

std::string make_instruction(const Lattice& lat, const std::vector<int>& main,
                             const std::vector<std::uint8_t>& has_branch,
                             const std::vector<std::uint8_t>& in_room) {
  std::vector<std::string> steps;
  for (std::size_t k = 1; k + 1 < main.size(); ++k) {
    const int di0 = main[k] % lat.nodes - main[k - 1] % lat.nodes;
    const int dj0 = main[k] / lat.nodes - main[k - 1] / lat.nodes;
    const int di1 = main[k + 1] % lat.nodes - main[k] % lat.nodes;
    const int dj1 = main[k + 1] / lat.nodes - main[k] / lat.nodes;
    const int cross = di0 * dj1 - dj0 * di1;
    const bool junction = has_branch[static_cast<std::size_t>(main[k])] != 0;
    const bool room = in_room[static_cast<std::size_t>(main[k])] != 0;
    if (room) {
      if (steps.empty() || steps.back() != "cross the room") steps.emplace_back("cross the room");
      continue;
    }
    if (cross > 0) {
      steps.emplace_back(junction ? "turn left at the junction" : "turn left");
    } else if (cross < 0) {
      steps.emplace_back(junction ? "turn right at the junction" : "turn right");
    } else if (junction) {
      steps.emplace_back("go straight through the junction");
    }
  }
  std::string text = "Follow the corridor";
  for (const auto& s : steps) text += ", then " + s;
  text += ", and stop at the end of the corridor.";
  return text;
}

}  // namespace

GeneratedScenario generate(const GenSpec& gs) {
  if (gs.corridor_width < 1) throw Error("corridor_width must be at least 1");
  if (gs.resolution <= 0.0) throw Error("resolution must be positive");
  if (!(gs.step_budget_factor > 0.0)) throw Error("step_budget_factor must be positive");
  if (gs.min_spur < 1 || gs.max_spur < gs.min_spur) throw Error("invalid spur length range");
  Lattice proto;
  proto.width = gs.corridor_width;
  proto.pitch = gs.corridor_width + 1;
  proto.nodes = (gs.size - 1) / proto.pitch;
  if (proto.nodes < 2) throw Error(fmt::format("size {} is too small", gs.size));
  proto.size = 1 + proto.nodes * proto.pitch;

  const int target_cells = static_cast<int>(std::ceil(gs.min_geodesic / gs.resolution));
  const int target_nodes = (target_cells + proto.pitch - 1) / proto.pitch + 1;

  Rng rng(mix_seed(gs.seed, 0x5ce7a10ULL));
  for (int attempt = 0; attempt < gs.max_attempts; ++attempt) {
    Lattice lat = proto;
    lat.cells.assign(static_cast<std::size_t>(lat.size * lat.size), CellState::Occupied);
    const int node_count = lat.nodes * lat.nodes;
    std::vector<std::uint8_t> used(static_cast<std::size_t>(node_count), 0);

    const int start_node = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(node_count)));
    const int extra = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(target_nodes / 2 + 1)));
    const std::vector<int> main = random_walk(rng, lat, used, start_node, target_nodes + extra);
    if (static_cast<int>(main.size()) < target_nodes) continue;
    for (std::size_t k = 1; k < main.size(); ++k) lat.carve_edge(main[k - 1], main[k]);

    std::vector<std::uint8_t> has_branch(static_cast<std::size_t>(node_count), 0);
    std::vector<int> anchors(main.begin() + 1, main.end() - 1);
    for (std::size_t k = anchors.size(); k > 1; --k) {
      std::swap(anchors[k - 1], anchors[uniform_index(rng, k)]);
    }
    int branches = 0;
    for (int anchor : anchors) {
      if (branches >= gs.junction_target) break;
      const auto options = free_neighbors(lat, used, anchor);
      if (options.empty()) continue;
      const int first = options[uniform_index(rng, options.size())];
      const int len = gs.min_spur + static_cast<int>(uniform_index(
                                        rng, static_cast<std::uint64_t>(gs.max_spur - gs.min_spur + 1)));
      const std::vector<int> spur = random_walk(rng, lat, used, first, len);
      lat.carve_edge(anchor, spur.front());
      for (std::size_t k = 1; k < spur.size(); ++k) lat.carve_edge(spur[k - 1], spur[k]);
      has_branch[static_cast<std::size_t>(anchor)] = 1;
      ++branches;
    }

    std::vector<std::uint8_t> in_room(static_cast<std::size_t>(node_count), 0);
    int rooms = 0;
    for (std::size_t k = 1; k + 1 < main.size() && rooms < gs.room_count; ++k) {
      if (uniform01(rng) > 0.3 || has_branch[static_cast<std::size_t>(main[k])]) continue;
      const int mi = main[k] % lat.nodes;
      const int mj = main[k] / lat.nodes;
      // 2x2 block with main[k] in a corner and the other three nodes unused.
      for (int corner = 0; corner < 4; ++corner) {
        const int i0 = mi - (corner & 1);
        const int j0 = mj - ((corner >> 1) & 1);
        if (i0 < 0 || j0 < 0 || i0 + 1 >= lat.nodes || j0 + 1 >= lat.nodes) continue;
        bool ok = true;
        for (int dj = 0; dj < 2 && ok; ++dj) {
          for (int di = 0; di < 2 && ok; ++di) {
            const int id = lat.node_id(i0 + di, j0 + dj);
            if (id != main[k] && used[static_cast<std::size_t>(id)]) ok = false;
          }
        }
        if (!ok) continue;
        const int a = lat.node_id(i0, j0), b = lat.node_id(i0 + 1, j0);
        const int c = lat.node_id(i0, j0 + 1), d = lat.node_id(i0 + 1, j0 + 1);
        lat.carve_edge(a, b);
        lat.carve_edge(c, d);
        lat.carve_edge(a, c);
        lat.carve_edge(b, d);
        lat.carve_block_center(i0, j0);
        for (int id : {a, b, c, d}) {
          used[static_cast<std::size_t>(id)] = 1;
          in_room[static_cast<std::size_t>(id)] = 1;
        }
        ++rooms;
        break;
      }
    }
    if (rooms < gs.room_count) continue;

    GridFrame frame{lat.size, lat.size, gs.resolution};
    GroundTruthGrid grid(frame, lat.cells);
    const int start_cell = lat.cell_of_node(main.front());
    const int goal_cell = lat.cell_of_node(main.back());
    if (distance(frame.center(start_cell), frame.center(goal_cell)) < gs.min_separation) continue;
    const auto passable = passable_mask(grid);
    const std::vector<double> dist = distance_field(frame, passable, start_cell);
    const double geodesic_m = dist[static_cast<std::size_t>(goal_cell)] * gs.resolution;
    if (!(geodesic_m >= gs.min_geodesic)) continue;
    bool connected = true;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (passable[i] && std::isinf(dist[i])) connected = false;
    }
    if (!connected) continue;
    const int junctions = count_junctions(grid);
    if (gs.corridor_width == 1 && std::abs(junctions - gs.junction_target) > 2) continue;

    GeneratedScenario out;
    out.spec.grid = std::move(grid);
    const Point sp = frame.center(start_cell);
    out.spec.start = Pose{sp.x, sp.y, static_cast<int>(uniform_index(rng, 4)) * 90};
    out.spec.goal = frame.center(goal_cell);
    out.spec.instruction = make_instruction(lat, main, has_branch, in_room);
    out.spec.max_steps = std::min(500, static_cast<int>(std::ceil(gs.step_budget_factor * geodesic_m / gs.resolution)));
    const PlanResult geo = astar_cells(frame, passable, start_cell, goal_cell);
    for (int c : geo.path.cells) out.reference_path.push_back(frame.center(c));
    out.geodesic_m = geodesic_m;
    out.junctions = junctions;
    validate(out.spec);
    return out;
  }
  throw GenerationExhausted(
      fmt::format("no scenario satisfied the constraints after {} attempts (seed {})", gs.max_attempts, gs.seed));
}

}  // namespace dualnav
