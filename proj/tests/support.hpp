#pragma once
// Shared helpers for unit and acceptance tests: random inputs and
// independent oracles that do not reuse library internals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "dualnav/mapping.hpp"
#include "dualnav/planner.hpp"
#include "dualnav/views.hpp"
#include "dualnav/world.hpp"

namespace testsupport {

using dualnav::CellState;
using dualnav::GridFrame;
using dualnav::GroundTruthGrid;
using dualnav::Point;

inline GroundTruthGrid grid(const std::vector<std::string>& rows, double res = 0.25) {
  return GroundTruthGrid::from_rows(rows, res);
}

// Bordered width x height map with interior obstacles at the given density.
inline GroundTruthGrid random_grid(std::mt19937_64& rng, int width, int height, double density,
                                   double res = 0.25) {
  std::bernoulli_distribution wall(density);
  std::vector<CellState> cells(static_cast<std::size_t>(width * height), CellState::Occupied);
  for (int r = 1; r + 1 < height; ++r) {
    for (int c = 1; c + 1 < width; ++c) {
      cells[static_cast<std::size_t>(r * width + c)] = wall(rng) ? CellState::Occupied : CellState::Free;
    }
  }
  return GroundTruthGrid(GridFrame{width, height, res}, std::move(cells));
}

// Exact octile length a + b*sqrt(2), ordered without floating point.
struct Exact {
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const Exact&, const Exact&) = default;
};

inline int sign_of(std::int64_t x) { return (x > 0) - (x < 0); }

// sign(x + y*sqrt(2))
inline int sign_mixed(std::int64_t x, std::int64_t y) {
  const int sx = sign_of(x);
  const int sy = sign_of(y);
  if (sx == 0) return sy;
  if (sy == 0 || sx == sy) return sx;
  // opposite signs: compare x^2 with 2y^2
  const __int128 x2 = static_cast<__int128>(x) * x;
  const __int128 y2 = 2 * static_cast<__int128>(y) * y;
  if (x2 == y2) return 0;
  return x2 > y2 ? sx : sy;
}

inline bool less(const Exact& l, const Exact& r) { return sign_mixed(l.a - r.a, l.b - r.b) < 0; }

// Plain Dijkstra over 8-connectivity without corner cutting.
inline std::vector<std::optional<Exact>> dijkstra(const GridFrame& f, const std::vector<std::uint8_t>& open,
                                                  int source) {
  const int n = f.cell_count();
  std::vector<std::optional<Exact>> dist(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> done(static_cast<std::size_t>(n), 0);
  if (!open[static_cast<std::size_t>(source)]) return dist;
  dist[static_cast<std::size_t>(source)] = Exact{0, 0};
  // O(n^2) selection keeps the oracle obviously correct.
  for (int iter = 0; iter < n; ++iter) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)] || !dist[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || less(*dist[static_cast<std::size_t>(i)], *dist[static_cast<std::size_t>(best)])) best = i;
    }
    if (best < 0) break;
    done[static_cast<std::size_t>(best)] = 1;
    const int c = f.col_of(best), r = f.row_of(best);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nc = c + dc, nr = r + dr;
        if (!f.in_bounds(nc, nr) || !open[static_cast<std::size_t>(f.index(nc, nr))]) continue;
        if (dr != 0 && dc != 0 &&
            (!open[static_cast<std::size_t>(f.index(c + dc, r))] || !open[static_cast<std::size_t>(f.index(c, r + dr))])) {
          continue;
        }
        const int nb = f.index(nc, nr);
        Exact cand = *dist[static_cast<std::size_t>(best)];
        if (dr != 0 && dc != 0) {
          ++cand.b;
        } else {
          ++cand.a;
        }
        auto& slot = dist[static_cast<std::size_t>(nb)];
        if (!slot || less(cand, *slot)) slot = cand;
      }
    }
  }
  return dist;
}

// Same as above but with a binary heap on doubles; fast enough for many
// queries, used where the O(n^2) version would be too slow.
inline std::vector<double> dijkstra_fast(const GridFrame& f, const std::vector<std::uint8_t>& open, int source) {
  const int n = f.cell_count();
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  if (!open[static_cast<std::size_t>(source)]) return dist;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, cur] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(cur)]) continue;
    const int c = f.col_of(cur), r = f.row_of(cur);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nc = c + dc, nr = r + dr;
        if (!f.in_bounds(nc, nr) || !open[static_cast<std::size_t>(f.index(nc, nr))]) continue;
        if (dr != 0 && dc != 0 &&
            (!open[static_cast<std::size_t>(f.index(c + dc, r))] || !open[static_cast<std::size_t>(f.index(c, r + dr))])) {
          continue;
        }
        const int nb = f.index(nc, nr);
        const double nd = d + ((dr != 0 && dc != 0) ? std::sqrt(2.0) : 1.0);
        if (nd < dist[static_cast<std::size_t>(nb)]) {
          dist[static_cast<std::size_t>(nb)] = nd;
          pq.push({nd, nb});
        }
      }
    }
  }
  return dist;
}

inline std::vector<std::uint8_t> open_mask(const GroundTruthGrid& g) {
  std::vector<std::uint8_t> m(g.cells().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.cells()[i] == CellState::Free;
  return m;
}

// Belief map revealing a random subset of a ground-truth grid: a few
// disc-shaped observed regions around random free cells.
inline dualnav::OccupancyMap partial_map(std::mt19937_64& rng, const GroundTruthGrid& g, int discs, int radius) {
  const GridFrame& f = g.frame();
  std::vector<CellState> cells(g.cells().size(), CellState::Unknown);
  std::uniform_int_distribution<int> pick(0, f.cell_count() - 1);
  for (int k = 0; k < discs; ++k) {
    const int center = pick(rng);
    const int cc = f.col_of(center), cr = f.row_of(center);
    for (int r = cr - radius; r <= cr + radius; ++r) {
      for (int c = cc - radius; c <= cc + radius; ++c) {
        if (!f.in_bounds(c, r) || (c - cc) * (c - cc) + (r - cr) * (r - cr) > radius * radius) continue;
        cells[static_cast<std::size_t>(f.index(c, r))] = g.cells()[static_cast<std::size_t>(f.index(c, r))];
      }
    }
  }
  return dualnav::OccupancyMap(f, std::move(cells));
}

// Frontier oracle: per-cell predicate, then union-find over 8-neighbours.
struct OracleCluster {
  std::vector<int> cells;
  int representative = 0;
};

inline std::vector<OracleCluster> frontier_oracle(const dualnav::OccupancyMap& m, int min_cluster) {
  const GridFrame& f = m.frame();
  const int n = f.cell_count();
  auto state = [&](int c, int r) {
    return f.in_bounds(c, r) ? m.cells()[static_cast<std::size_t>(f.index(c, r))] : CellState::Occupied;
  };
  std::vector<std::uint8_t> is_front(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const int c = f.col_of(i), r = f.row_of(i);
    if (state(c, r) != CellState::Free) continue;
    is_front[static_cast<std::size_t>(i)] = state(c + 1, r) == CellState::Unknown ||
                                            state(c - 1, r) == CellState::Unknown ||
                                            state(c, r + 1) == CellState::Unknown ||
                                            state(c, r - 1) == CellState::Unknown;
  }
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    if (!is_front[static_cast<std::size_t>(i)]) continue;
    const int c = f.col_of(i), r = f.row_of(i);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (!f.in_bounds(c + dc, r + dr)) continue;
        const int j = f.index(c + dc, r + dr);
        if (is_front[static_cast<std::size_t>(j)]) parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (is_front[static_cast<std::size_t>(i)]) groups[static_cast<std::size_t>(find(i))].push_back(i);
  }
  std::vector<OracleCluster> out;
  for (auto& g : groups) {
    if (static_cast<int>(g.size()) < min_cluster || g.empty()) continue;
    double sx = 0, sy = 0;
    for (int i : g) {
      sx += f.col_of(i);
      sy += f.row_of(i);
    }
    sx /= static_cast<double>(g.size());
    sy /= static_cast<double>(g.size());
    int rep = g.front();
    double best = std::numeric_limits<double>::infinity();
    for (int i : g) {  // ascending, so ties keep the lowest index
      const double d = (f.col_of(i) - sx) * (f.col_of(i) - sx) + (f.row_of(i) - sy) * (f.row_of(i) - sy);
      if (d < best) {
        best = d;
        rep = i;
      }
    }
    out.push_back({g, rep});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.representative < b.representative; });
  return out;
}

// Pruning oracle written directly from the keep rule.
inline std::vector<int> prune_oracle(const std::vector<std::vector<double>>& e, double tau, bool consecutive) {
  auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return d / std::sqrt(na * nb);
  };
  std::vector<int> kept;
  if (e.empty()) return kept;
  kept.push_back(0);
  for (std::size_t k = 1; k < e.size(); ++k) {
    const std::size_t ref = consecutive ? k - 1 : static_cast<std::size_t>(kept.back());
    if (cosine(e[k], e[ref]) < tau) kept.push_back(static_cast<int>(k));
  }
  return kept;
}

// Textbook DTW table with Euclidean point cost.
inline double dtw_oracle(const std::vector<Point>& q, const std::vector<Point>& r) {
  const std::size_t n = q.size(), m = r.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> t(n + 1, std::vector<double>(m + 1, inf));
  t[0][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::hypot(q[i - 1].x - r[j - 1].x, q[i - 1].y - r[j - 1].y);
      t[i][j] = cost + std::min({t[i - 1][j], t[i][j - 1], t[i - 1][j - 1]});
    }
  }
  return t[n][m];
}

}  // namespace testsupport
