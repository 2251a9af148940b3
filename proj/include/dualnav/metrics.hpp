#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dualnav/planner.hpp"
#include "dualnav/trace.hpp"
#include "dualnav/world.hpp"

namespace dualnav {

// Shortest collision-free route on the ground truth from the start cell to the
// goal cell (cell centers, every visited cell). Throws Error if unreachable.
PlannedPath geodesic_path(const EpisodeSpec& spec);

// Annotated reference if the scenario has one, else the geodesic.
std::vector<Point> reference_path(const EpisodeSpec& spec);

double dtw_distance(std::span<const Point> query, std::span<const Point> reference);
// exp(-DTW / (|reference| * scale))
double ndtw(std::span<const Point> query, std::span<const Point> reference, double scale);

struct EpisodeRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  double ne_m = 0.0;
  double success = 0.0;
  double oracle_success = 0.0;
  double spl = 0.0;
  double ndtw = 0.0;
  double at_s = 0.0;
  int steps = 0;
};

// geodesic_m is the shortest-path length start -> goal in meters.
EpisodeRecord episode_metrics(const EpisodeResult& result, const EpisodeSpec& spec,
                              std::span<const Point> reference, double geodesic_m);
// Convenience overload deriving the geodesic and reference from the spec.
EpisodeRecord episode_metrics(const EpisodeResult& result, const EpisodeSpec& spec);

struct MetricsReport {
  double ne_m = 0.0;
  double sr = 0.0;
  double os = 0.0;
  double spl = 0.0;
  double ndtw = 0.0;
  double at_s = 0.0;
  int n_episodes = 0;
};

MetricsReport aggregate(std::span<const EpisodeRecord> records);

// CSV columns: scenario,seed,ne_m,sr,os,spl,ndtw,steps[,at_s]; the last row
// is the aggregate with scenario "mean" and an empty seed. Wall time is
// only written when include_time is set, so the default output is
// reproducible byte-for-byte.
void write_metrics_csv(std::ostream& out, std::span<const EpisodeRecord> records, bool include_time = false);
void write_metrics_json(std::ostream& out, std::span<const EpisodeRecord> records, bool include_time = false);

}  // namespace dualnav
