#include "dualnav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <thread>

#include <fmt/format.h>

namespace dualnav {

std::vector<Action> steer_chunk(int heading, int desired, int max_chunk) {
  std::vector<Action> out;
  int h = normalize_heading(heading);
  const int target = normalize_heading(desired);
  while (static_cast<int>(out.size()) < max_chunk && h != target) {
    const int left = normalize_heading(target - h);  // degrees turning left
    if (left <= 180) {
      out.push_back(Action::TurnLeft);
      h = normalize_heading(h + kTurnStepDeg);
    } else {
      out.push_back(Action::TurnRight);
      h = normalize_heading(h - kTurnStepDeg);
    }
  }
  if (static_cast<int>(out.size()) < max_chunk && h == target) out.push_back(Action::MoveForward);
  return out;
}

ScriptedFastPolicy::ScriptedFastPolicy(const EpisodeSpec& spec, ScriptedConfig cfg)
    : spec_(&spec), cfg_(cfg), passable_(passable_mask(spec.grid)) {
  if (cfg_.max_chunk < 1) throw Error("max_chunk must be at least 1");
  if (cfg_.p_err < 0.0 || cfg_.p_err > 1.0) throw Error("p_err must lie in [0, 1]");
  const auto goal = spec.grid.frame().cell_at(spec.goal);
  if (!goal) throw Error("goal outside the grid");
  goal_field_ = distance_field(spec.grid.frame(), passable_, *goal);
  // Different scenarios under the same seed must not share a random stream.
  fingerprint_ = 0xcbf29ce484222325ULL;
  auto mix = [this](std::uint64_t v) { fingerprint_ = (fingerprint_ ^ v) * 0x100000001b3ULL; };
  for (CellState c : spec.grid.cells()) mix(static_cast<std::uint64_t>(c));
  mix(static_cast<std::uint64_t>(spec.grid.frame().width));
  mix(static_cast<std::uint64_t>(*spec.grid.frame().cell_at(spec.start.position())));
  mix(static_cast<std::uint64_t>(*goal));
}

int ScriptedFastPolicy::next_cell_toward(int cell, const std::vector<double>& field) const {
  // 4-neighbour descent keeps axis moves on cell centers. With no corner
  // cutting some orthogonal neighbour of any octile-optimal move is at least
  // as good as staying, so the descent never stalls short of the source.
  const GridFrame& f = spec_->grid.frame();
  const int c = f.col_of(cell);
  const int r = f.row_of(cell);
  int best = cell;
  double best_cost = field[static_cast<std::size_t>(cell)];
  const int nbs[4][2] = {{c + 1, r}, {c, r + 1}, {c - 1, r}, {c, r - 1}};
  for (const auto& nb : nbs) {
    if (!f.in_bounds(nb[0], nb[1])) continue;
    const int idx = f.index(nb[0], nb[1]);
    if (!passable_[static_cast<std::size_t>(idx)]) continue;
    const double cost = field[static_cast<std::size_t>(idx)];
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best = idx;
    }
  }
  return best;
}

std::optional<int> ScriptedFastPolicy::pick_decoy(int junction_cell, int branch_cell) const {
  const GridFrame& f = spec_->grid.frame();
  std::vector<int> depth(static_cast<std::size_t>(f.cell_count()), -1);
  depth[static_cast<std::size_t>(junction_cell)] = 0;
  depth[static_cast<std::size_t>(branch_cell)] = 1;
  std::deque<int> queue{branch_cell};
  int best = branch_cell;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    const int d = depth[static_cast<std::size_t>(cur)];
    if (d > depth[static_cast<std::size_t>(best)] ||
        (d == depth[static_cast<std::size_t>(best)] && cur < best)) {
      best = cur;
    }
    if (d >= cfg_.commit_depth) continue;
    const int c = f.col_of(cur);
    const int r = f.row_of(cur);
    const int nbs[4][2] = {{c + 1, r}, {c - 1, r}, {c, r + 1}, {c, r - 1}};
    for (const auto& nb : nbs) {
      if (!f.in_bounds(nb[0], nb[1])) continue;
      const int idx = f.index(nb[0], nb[1]);
      if (!passable_[static_cast<std::size_t>(idx)] || depth[static_cast<std::size_t>(idx)] >= 0) continue;
      depth[static_cast<std::size_t>(idx)] = d + 1;
      queue.push_back(idx);
    }
  }
  return best;
}

FastDecision ScriptedFastPolicy::decide(const FastInput& in) {
  if (in.history.empty()) throw Error("fast policy needs at least one observation");
  if (!rng_) rng_.emplace(mix_seed(in.seed, fingerprint_));
  const GridFrame& f = spec_->grid.frame();
  const Pose pose = in.history.back().pose;
  FastDecision out;

  if (distance(pose.position(), spec_->goal) <= spec_->success_radius) {
    out.actions = {Action::Stop};
    return out;
  }
  const auto cell_opt = f.cell_at(pose.position());
  if (!cell_opt) throw Error("agent outside the grid");
  const int cell = *cell_opt;
  if (cell != last_cell_) {
    prev_cell_ = last_cell_;
    last_cell_ = cell;
  }

  if (decoy_ && cell == *decoy_) decoy_.reset();

  const OccupancyMap* belief = in.belief;
  auto belief_free = [&](int idx) {
    return belief ? belief->is_free(idx) : passable_[static_cast<std::size_t>(idx)] != 0;
  };
  int free_neighbors = 0;
  std::vector<int> neighbors;
  {
    const int c = f.col_of(cell);
    const int r = f.row_of(cell);
    const int nbs[4][2] = {{c + 1, r}, {c - 1, r}, {c, r + 1}, {c, r - 1}};
    for (const auto& nb : nbs) {
      if (!f.in_bounds(nb[0], nb[1])) continue;
      const int idx = f.index(nb[0], nb[1]);
      if (belief_free(idx)) {
        ++free_neighbors;
        neighbors.push_back(idx);
      }
    }
  }
  const bool junction = free_neighbors >= 3;
  if (!junction) last_decision_cell_ = -1;

  if (junction && !decoy_ && cell != last_decision_cell_) {
    last_decision_cell_ = cell;
    const int correct = next_cell_toward(cell, goal_field_);
    std::vector<int> wrong;
    for (int nb : neighbors) {
      if (nb != correct && nb != prev_cell_ && passable_[static_cast<std::size_t>(nb)]) wrong.push_back(nb);
    }
    if (!wrong.empty()) {
      ++decisions_;
      if (uniform01(*rng_) < cfg_.p_err) {
        ++errors_;
        const int branch = wrong[uniform_index(*rng_, wrong.size())];
        decoy_ = pick_decoy(cell, branch);
        decoy_field_ = distance_field(f, passable_, *decoy_);
        out.note = "junction:wrong";
      } else {
        out.note = "junction:ok";
      }
    }
  }

  const std::vector<double>& field = decoy_ ? decoy_field_ : goal_field_;
  int next = next_cell_toward(cell, field);
  Point aim = f.center(next);
  if (next == cell) aim = decoy_ ? f.center(*decoy_) : spec_->goal;
  const double dx = aim.x - pose.x;
  const double dy = aim.y - pose.y;
  if (dx == 0.0 && dy == 0.0) {
    out.actions = {Action::TurnLeft};
    return out;
  }
  const int desired = snap_heading(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
  out.actions = steer_chunk(pose.heading_deg, desired, cfg_.max_chunk);
  return out;
}

void ScriptedFastPolicy::on_resume() {
  decoy_.reset();
  last_decision_cell_ = last_cell_;
}

ReplayFastPolicy::ReplayFastPolicy(std::vector<Action> actions, int chunk)
    : actions_(std::move(actions)), chunk_(chunk) {
  if (actions_.empty()) throw Error("replay policy needs actions");
  if (chunk_ < 1) throw Error("chunk must be at least 1");
}

FastDecision ReplayFastPolicy::decide(const FastInput&) {
  FastDecision out;
  for (int i = 0; i < chunk_; ++i) {
    out.actions.push_back(actions_[pos_ % actions_.size()]);
    ++pos_;
    if (out.actions.back() == Action::Stop) break;
  }
  return out;
}

std::string frontier_label(int index) { return fmt::format("F{}", index + 1); }

std::string_view slow_error_name(SlowErrorKind k) noexcept {
  switch (k) {
    case SlowErrorKind::NoCandidates: return "NoCandidates";
    case SlowErrorKind::Transport: return "TransportError";
    case SlowErrorKind::Timeout: return "Timeout";
    case SlowErrorKind::MalformedReply: return "MalformedReply";
    case SlowErrorKind::InvalidSelection: return "InvalidSelection";
  }
  return "Unknown";
}

SlowPlannerError::SlowPlannerError(SlowErrorKind kind, const std::string& msg)
    : Error(fmt::format("{}: {}", slow_error_name(kind), msg)), kind_(kind) {}

OracleSlowPlanner::OracleSlowPlanner(const EpisodeSpec& spec) : frame_(spec.grid.frame()) {
  const auto goal = frame_.cell_at(spec.goal);
  if (!goal) throw Error("goal outside the grid");
  goal_field_ = distance_field(frame_, passable_mask(spec.grid), *goal);
}

double OracleSlowPlanner::goal_distance(int cell) const {
  return goal_field_.at(static_cast<std::size_t>(cell));
}

FrontierChoice OracleSlowPlanner::plan(const PlanRequest& request) {
  if (request.candidates.empty()) throw SlowPlannerError(SlowErrorKind::NoCandidates, "no frontier candidates");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < request.candidates.size(); ++i) {
    const double d = goal_distance(request.candidates[i].frontier.representative_cell);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return {best, frontier_label(best), "oracle geodesic"};
}

LatencyStubPlanner::LatencyStubPlanner(std::shared_ptr<SlowPlanner> inner, std::chrono::microseconds delay)
    : inner_(std::move(inner)), delay_(delay) {}

FrontierChoice LatencyStubPlanner::plan(const PlanRequest& request) {
  std::this_thread::sleep_for(delay_);
  return inner_->plan(request);
}

FrontierChoice nearest_frontier_choice(const PlanRequest& request, std::string_view reason) {
  if (request.candidates.empty()) throw SlowPlannerError(SlowErrorKind::NoCandidates, "no frontier candidates");
  int best = 0;
  for (std::size_t i = 1; i < request.candidates.size(); ++i) {
    if (request.candidates[i].path.cost_units < request.candidates[static_cast<std::size_t>(best)].path.cost_units) {
      best = static_cast<int>(i);
    }
  }
  return {best, frontier_label(best), fmt::format("fallback: nearest frontier by path cost ({})", reason)};
}

}  // namespace dualnav
