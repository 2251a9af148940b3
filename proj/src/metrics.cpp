#include "dualnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "dualnav/kernels.hpp"

namespace dualnav {

PlannedPath geodesic_path(const EpisodeSpec& spec) {
  const GridFrame& f = spec.grid.frame();
  const auto s = f.cell_at(spec.start.position());
  const auto g = f.cell_at(spec.goal);
  if (!s || !g) throw Error("start or goal outside the grid");
  PlanResult r = astar_cells(f, passable_mask(spec.grid), *s, *g);
  if (!r) throw Error("goal unreachable from start");
  return std::move(r.path);
}

std::vector<Point> reference_path(const EpisodeSpec& spec) {
  if (!spec.reference_path.empty()) return spec.reference_path;
  const PlannedPath p = geodesic_path(spec);
  std::vector<Point> pts;
  pts.reserve(p.cells.size());
  for (int c : p.cells) pts.push_back(spec.grid.frame().center(c));
  return pts;
}

double dtw_distance(std::span<const Point> query, std::span<const Point> reference) {
  if (query.empty() || reference.empty()) throw Error("DTW needs non-empty paths");
  const std::size_t m = reference.size();
  std::vector<double> rx(m);
  std::vector<double> ry(m);
  for (std::size_t j = 0; j < m; ++j) {
    rx[j] = reference[j].x;
    ry[j] = reference[j].y;
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> cur(m + 1, kInf);
  std::vector<double> cost(m);
  prev[0] = 0.0;
  const auto& k = kernels::active();
  for (const Point& q : query) {
    k.distance_row(q.x, q.y, rx.data(), ry.data(), cost.data(), m);
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = cost[j - 1] + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double ndtw(std::span<const Point> query, std::span<const Point> reference, double scale) {
  return std::exp(-dtw_distance(query, reference) / (static_cast<double>(reference.size()) * scale));
}

EpisodeRecord episode_metrics(const EpisodeResult& result, const EpisodeSpec& spec,
                              std::span<const Point> reference, double geodesic_m) {
  if (result.path.empty()) throw Error("episode path is empty");
  if (reference.empty()) throw Error("reference path is empty");
  EpisodeRecord rec;
  const Point final_pos = result.path.back();
  rec.ne_m = distance(final_pos, spec.goal);
  rec.success = result.success ? 1.0 : 0.0;
  double closest = std::numeric_limits<double>::infinity();
  for (const Point& p : result.path) closest = std::min(closest, distance(p, spec.goal));
  rec.oracle_success = closest <= spec.success_radius ? 1.0 : 0.0;
  const double travelled = path_length(result.path);
  rec.spl = rec.success * (geodesic_m > 0.0 || travelled > 0.0
                               ? geodesic_m / std::max(travelled, geodesic_m)
                               : 1.0);
  rec.ndtw = ndtw(result.path, reference, spec.success_radius);
  rec.at_s = result.wall_time;
  rec.steps = result.step_count;
  return rec;
}

EpisodeRecord episode_metrics(const EpisodeResult& result, const EpisodeSpec& spec) {
  const PlannedPath geo = geodesic_path(spec);
  const std::vector<Point> ref = reference_path(spec);
  return episode_metrics(result, spec, ref, geo.cost);
}

MetricsReport aggregate(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw Error("cannot aggregate zero episodes");
  MetricsReport r;
  for (const auto& e : records) {
    r.ne_m += e.ne_m;
    r.sr += e.success;
    r.os += e.oracle_success;
    r.spl += e.spl;
    r.ndtw += e.ndtw;
    r.at_s += e.at_s;
  }
  const double n = static_cast<double>(records.size());
  r.ne_m /= n;
  r.sr /= n;
  r.os /= n;
  r.spl /= n;
  r.ndtw /= n;
  r.at_s /= n;
  r.n_episodes = static_cast<int>(records.size());
  return r;
}

void write_metrics_csv(std::ostream& out, std::span<const EpisodeRecord> records, bool include_time) {
  out << "scenario,seed,ne_m,sr,os,spl,ndtw,steps" << (include_time ? ",at_s" : "") << '\n';
  for (const auto& e : records) {
    out << fmt::format("{},{},{:.6f},{:.0f},{:.0f},{:.6f},{:.6f},{}", e.scenario, e.seed, e.ne_m,
                       e.success, e.oracle_success, e.spl, e.ndtw, e.steps);
    if (include_time) out << fmt::format(",{:.6f}", e.at_s);
    out << '\n';
  }
  if (records.empty()) return;
  const MetricsReport r = aggregate(records);
  double steps = 0.0;
  for (const auto& e : records) steps += e.steps;
  out << fmt::format("mean,,{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.2f}", r.ne_m, r.sr, r.os, r.spl,
                     r.ndtw, steps / static_cast<double>(records.size()));
  if (include_time) out << fmt::format(",{:.6f}", r.at_s);
  out << '\n';
}

void write_metrics_json(std::ostream& out, std::span<const EpisodeRecord> records, bool include_time) {
  nlohmann::ordered_json j;
  auto eps = nlohmann::ordered_json::array();
  for (const auto& e : records) {
    nlohmann::ordered_json row{{"scenario", e.scenario}, {"seed", e.seed},  {"ne_m", e.ne_m},
                               {"success", e.success},   {"os", e.oracle_success},
                               {"spl", e.spl},           {"ndtw", e.ndtw}, {"steps", e.steps}};
    if (include_time) row["at_s"] = e.at_s;
    eps.push_back(std::move(row));
  }
  j["episodes"] = std::move(eps);
  if (!records.empty()) {
    const MetricsReport r = aggregate(records);
    nlohmann::ordered_json agg{{"ne_m", r.ne_m}, {"sr", r.sr},     {"os", r.os},
                               {"spl", r.spl},   {"ndtw", r.ndtw}, {"n_episodes", r.n_episodes}};
    if (include_time) agg["at_s"] = r.at_s;
    j["aggregate"] = std::move(agg);
  }
  out << j.dump(2) << '\n';
}

}  // namespace dualnav
