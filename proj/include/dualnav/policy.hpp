#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dualnav/mapping.hpp"
#include "dualnav/planner.hpp"
#include "dualnav/random.hpp"
#include "dualnav/views.hpp"
#include "dualnav/world.hpp"

namespace dualnav {

// ---- fast system -----------------------------------------------------------

struct FastInput {
  std::span<const Observation> history;  // most recent last, never empty
  std::string_view instruction;
  std::uint64_t seed = 0;
  const OccupancyMap* belief = nullptr;  // current belief map
};

struct FastDecision {
  std::vector<Action> actions;  // 1..max_chunk actions
  std::string note;             // e.g. "junction:wrong", recorded in the trace
};

class FastPolicy {
 public:
  virtual ~FastPolicy() = default;
  virtual FastDecision decide(const FastInput& in) = 0;
  // Called when control returns from waypoint execution.
  virtual void on_resume() {}
  virtual int max_chunk() const { return 4; }
};

struct ScriptedConfig {
  double p_err = 0.25;
  int max_chunk = 4;
  int commit_depth = 40;  // cells explored down a wrongly chosen branch
};

// Ground-truth shortest-path follower that, on entering a junction cell
// (>= 3 free 4-neighbours in the belief map), commits to a wrong branch with
// probability p_err and follows it to its far end before resuming. Stops
// once within the success radius.
class ScriptedFastPolicy final : public FastPolicy {
 public:
  ScriptedFastPolicy(const EpisodeSpec& spec, ScriptedConfig cfg);

  FastDecision decide(const FastInput& in) override;
  void on_resume() override;
  int max_chunk() const override { return cfg_.max_chunk; }

  int junction_decisions() const noexcept { return decisions_; }
  int junction_errors() const noexcept { return errors_; }

 private:
  int next_cell_toward(int cell, const std::vector<double>& field) const;
  std::optional<int> pick_decoy(int junction_cell, int branch_cell) const;

  const EpisodeSpec* spec_;
  ScriptedConfig cfg_;
  std::vector<std::uint8_t> passable_;
  std::vector<double> goal_field_;
  std::vector<double> decoy_field_;
  std::optional<int> decoy_;
  std::optional<Rng> rng_;
  std::uint64_t fingerprint_ = 0;
  int last_cell_ = -1;
  int prev_cell_ = -1;
  int last_decision_cell_ = -1;
  int decisions_ = 0;
  int errors_ = 0;
};

// Emits a fixed action sequence (cycled); handy for tests.
class ReplayFastPolicy final : public FastPolicy {
 public:
  explicit ReplayFastPolicy(std::vector<Action> actions, int chunk = 4);
  FastDecision decide(const FastInput& in) override;
  int max_chunk() const override { return chunk_; }

 private:
  std::vector<Action> actions_;
  int chunk_;
  std::size_t pos_ = 0;
};

// Turns `heading` toward `desired` (both multiples of 15) along the shorter
// side, then moves forward; at most `max_chunk` actions.
std::vector<Action> steer_chunk(int heading, int desired, int max_chunk);

// ---- slow system -----------------------------------------------------------

struct Candidate {
  std::string label;        // "F1", "F2", ...
  Frontier frontier;
  Point target;             // projected frontier
  PlannedPath path;         // interpolated A* path from the agent
  std::vector<RenderedView> views;
  std::vector<int> kept;    // indices into views after pruning
};

struct PlanRequest {
  OccupancyMap topdown;
  Pose agent;
  std::string instruction;
  std::vector<Candidate> candidates;
};

struct FrontierChoice {
  int selected_index = 0;
  std::string selected_label;
  std::string reasoning;
  friend bool operator==(const FrontierChoice&, const FrontierChoice&) = default;
};

std::string frontier_label(int index);

enum class SlowErrorKind { NoCandidates, Transport, Timeout, MalformedReply, InvalidSelection };

std::string_view slow_error_name(SlowErrorKind k) noexcept;

class SlowPlannerError : public Error {
 public:
  SlowPlannerError(SlowErrorKind kind, const std::string& msg);
  SlowErrorKind kind() const noexcept { return kind_; }

 private:
  SlowErrorKind kind_;
};

class SlowPlanner {
 public:
  virtual ~SlowPlanner() = default;
  // Throws SlowPlannerError; the scheduler turns errors into fallbacks.
  virtual FrontierChoice plan(const PlanRequest& request) = 0;
};

// Picks the candidate whose representative is geodesically closest to the
// goal on the ground truth (lowest index on ties).
class OracleSlowPlanner final : public SlowPlanner {
 public:
  explicit OracleSlowPlanner(const EpisodeSpec& spec);
  FrontierChoice plan(const PlanRequest& request) override;
  double goal_distance(int cell) const;

 private:
  GridFrame frame_;
  std::vector<double> goal_field_;
};

// Adds a fixed wall-clock delay in front of another planner.
class LatencyStubPlanner final : public SlowPlanner {
 public:
  LatencyStubPlanner(std::shared_ptr<SlowPlanner> inner, std::chrono::microseconds delay);
  FrontierChoice plan(const PlanRequest& request) override;

 private:
  std::shared_ptr<SlowPlanner> inner_;
  std::chrono::microseconds delay_;
};

// Fallback used after any slow-planner failure: nearest candidate by path
// cost, lowest index on ties. Throws SlowPlannerError(NoCandidates) if empty.
FrontierChoice nearest_frontier_choice(const PlanRequest& request, std::string_view reason);

}  // namespace dualnav
