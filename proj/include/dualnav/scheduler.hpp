#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dualnav/planner.hpp"
#include "dualnav/policy.hpp"
#include "dualnav/trace.hpp"
#include "dualnav/views.hpp"
#include "dualnav/world.hpp"

namespace dualnav {

enum class WaypointFollow { Strict, ReplanOnBlock };

enum class ScheduleMode {
  Dual,      // fast policy with periodic slow requests
  SlowOnly,  // request, rotate in place while waiting, execute, repeat
};

struct ScheduleConfig {
  int ratio_k = 20;    // fast steps per slow request
  int latency_l = 8;   // fast steps between a request and its reply
  WaypointFollow follow = WaypointFollow::Strict;
  ScheduleMode mode = ScheduleMode::Dual;
  SensorConfig sensor;
  ViewConfig views;
  InterpolationConfig interp;
  int min_frontier_cluster = 1;  // a 1-cell corridor ends in a 1-cell frontier
  int history_window = 8;  // observations handed to the fast policy
  int max_replans = 3;     // ReplanOnBlock only
};

// Throws Error unless ratio_k >= 1, 0 <= latency_l < ratio_k and the nested
// configs are in range.
void validate(const ScheduleConfig& cfg);

// Frontier snapshot for one slow request: every frontier reachable on the
// belief map becomes a candidate with its interpolated path, rendered views
// and kept view indices. Labels are F1.. in frontier order.
PlanRequest build_plan_request(const OccupancyMap& map, const Pose& agent, const std::string& instruction,
                               const ScheduleConfig& cfg);

// Runs one episode. slow == nullptr gives the fast-only loop. The slow
// planner runs on a worker thread, but its reply is consumed at a fixed
// fast-step count, so the trace depends only on the inputs and seed.
EpisodeResult run_episode(const EpisodeSpec& spec, FastPolicy& fast, SlowPlanner* slow, const ScheduleConfig& cfg,
                          std::uint64_t seed);

// Policies are created per episode so no state leaks between episodes.
struct PolicyFactory {
  std::function<std::unique_ptr<FastPolicy>(const EpisodeSpec&)> fast;
  std::function<std::unique_ptr<SlowPlanner>(const EpisodeSpec&)> slow;  // may be empty
};

struct SuiteEntry {
  std::string scenario;  // file stem or caller-provided name
  std::uint64_t seed = 0;
  EpisodeSpec spec;
  std::optional<EpisodeResult> result;
  std::string error;  // set when the episode aborted
};

// Every (scenario, seed) pair in scenario-major, seed-minor order.
std::vector<SuiteEntry> run_suite(const std::vector<std::pair<std::string, EpisodeSpec>>& scenarios,
                                  const PolicyFactory& policies, const ScheduleConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds);

// Loads every *.json scenario in the directory, sorted by file name.
std::vector<std::pair<std::string, EpisodeSpec>> load_scenario_dir(const std::filesystem::path& dir);

}  // namespace dualnav
