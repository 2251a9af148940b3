#include "dualnav/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <numbers>

#include <fmt/format.h>

#include "dualnav/mapping.hpp"
#include "dualnav/scenario_io.hpp"

namespace dualnav {

void validate(const ScheduleConfig& cfg) {
  if (cfg.ratio_k < 1) throw Error("ratio_k must be at least 1");
  if (cfg.latency_l < 0) throw Error("latency_l must be non-negative");
  if (cfg.latency_l >= cfg.ratio_k) throw Error("latency_l must be smaller than ratio_k");
  if (!(cfg.interp.d > 0.0)) throw Error("interpolation spacing d must be positive");
  if (!(cfg.views.tau >= -1.0 && cfg.views.tau <= 1.0)) throw Error("tau must lie in [-1, 1]");
  if (cfg.views.patch_size < 1) throw Error("patch size must be positive");
  if (cfg.sensor.range_m <= 0.0 || cfg.sensor.fov_deg <= 0.0 || cfg.sensor.fov_deg > 360.0) {
    throw Error("sensor range and field of view must be positive");
  }
  if (cfg.history_window < 1) throw Error("history_window must be at least 1");
  if (cfg.max_replans < 0) throw Error("max_replans must be non-negative");
}

PlanRequest build_plan_request(const OccupancyMap& map, const Pose& agent, const std::string& instruction,
                               const ScheduleConfig& cfg) {
  PlanRequest req;
  req.topdown = map;
  req.agent = agent;
  req.instruction = instruction;
  const OccupancyEmbedder embedder;
  for (Frontier& f : detect_frontiers(map, cfg.min_frontier_cluster)) {
    const Point target = project_frontier(f);
    PlanResult plan = astar(map, agent.position(), target);
    if (!plan) continue;
    Candidate c;
    c.label = frontier_label(static_cast<int>(req.candidates.size()));
    c.target = target;
    c.path = interpolate(plan.path, cfg.interp);
    c.views = render_views(map, c.path.nodes, agent.heading_deg, cfg.views);
    std::vector<Embedding> embs;
    embs.reserve(c.views.size());
    for (const auto& v : c.views) embs.push_back(embedder.embed(v));
    c.kept = prune(std::span<const RenderedView>(c.views), std::span<const Embedding>(embs), cfg.views.tau,
                   cfg.views.prune_mode);
    c.frontier = std::move(f);
    req.candidates.push_back(std::move(c));
  }
  return req;
}

namespace {

struct SlowOutcome {
  std::optional<FrontierChoice> choice;
  std::string error;  // "<Kind>: message" when the planner failed
};

struct Pending {
  int id = 0;
  int issued_at = 0;  // fast-step count at request time
  std::shared_ptr<const PlanRequest> request;
  std::future<SlowOutcome> reply;
};

constexpr double kNodeReached = 0.125;
constexpr double kHeadingTolerance = 7.5;

class Episode {
 public:
  Episode(const EpisodeSpec& spec, FastPolicy& fast, SlowPlanner* slow, const ScheduleConfig& cfg,
          std::uint64_t seed)
      : spec_(spec), fast_(fast), slow_(slow), cfg_(cfg), seed_(seed), map_(spec.grid.frame()) {
    state_ = initial_state(spec);
    sense();
    path_.push_back(state_.pose.position());
  }

  EpisodeResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    if (slow_ != nullptr && cfg_.mode == ScheduleMode::SlowOnly) {
      run_slow_only();
    } else {
      run_dual();
    }
    if (pending_) close_pending_at_end();
    EpisodeResult r;
    r.stopped = state_.stopped;
    r.success = is_success(state_, spec_);
    r.final_pose = state_.pose;
    r.step_count = state_.steps;
    r.path = std::move(path_);
    r.trace.events = std::move(events_);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

 private:
  bool done() const { return is_terminated(state_, spec_); }

  void sense() {
    Observation obs = observe(state_.pose, spec_.grid, cfg_.sensor);
    map_.apply(obs);
    history_.push_back(std::move(obs));
    if (static_cast<int>(history_.size()) > cfg_.history_window) history_.pop_front();
  }

  void world_step(Action a) {
    state_ = step(state_, a, spec_.grid);
    if (a != Action::Stop) sense();
    path_.push_back(state_.pose.position());
  }

  TraceEvent& emit(EventKind kind) {
    TraceEvent& e = events_.emplace_back();
    e.step = state_.steps;
    e.fast_step = fast_steps_;
    e.kind = kind;
    e.pose = state_.pose;
    return e;
  }

  FastDecision ask_fast() {
    history_buf_.assign(history_.begin(), history_.end());
    FastInput in{std::span<const Observation>(history_buf_), spec_.instruction, seed_, &map_};
    FastDecision d = fast_.decide(in);
    if (d.actions.empty() || static_cast<int>(d.actions.size()) > fast_.max_chunk()) {
      throw Error(fmt::format("fast policy returned {} actions (limit {})", d.actions.size(), fast_.max_chunk()));
    }
    return d;
  }

  // ---- slow requests ----

  void issue_request() {
    auto request = std::make_shared<const PlanRequest>(
        build_plan_request(map_, state_.pose, spec_.instruction, cfg_));
    Pending p;
    p.id = next_request_id_++;
    p.issued_at = fast_steps_;
    p.request = request;
    SlowPlanner* planner = slow_;
    p.reply = std::async(std::launch::async, [planner, request]() {
      SlowOutcome out;
      try {
        out.choice = planner->plan(*request);
      } catch (const SlowPlannerError& e) {
        out.error = e.what();
      } catch (const std::exception& e) {
        out.error = fmt::format("{}: {}", slow_error_name(SlowErrorKind::Transport), e.what());
      }
      return out;
    });
    TraceEvent& e = emit(EventKind::SlowRequest);
    e.request_id = p.id;
    e.detail = fmt::format("candidates={}", request->candidates.size());
    for (const auto& c : request->candidates) e.frontiers.push_back(c.target);
    pending_ = std::move(p);
  }

  // Consumes the pending reply. Returns the candidate to execute, if any.
  std::optional<Candidate> resolve_pending() {
    Pending p = std::move(*pending_);
    pending_.reset();
    SlowOutcome out = p.reply.get();
    const PlanRequest& req = *p.request;
    if (out.choice) {
      const int idx = out.choice->selected_index;
      if (idx < 0 || idx >= static_cast<int>(req.candidates.size()) ||
          out.choice->selected_label != frontier_label(idx)) {
        out.error = fmt::format("{}: index {} label '{}' with {} candidates",
                                slow_error_name(SlowErrorKind::InvalidSelection), idx, out.choice->selected_label,
                                req.candidates.size());
        out.choice.reset();
      }
    }
    std::vector<Point> reps;
    for (const auto& c : req.candidates) reps.push_back(c.target);
    if (out.choice) {
      TraceEvent& e = emit(EventKind::SlowArrival);
      e.request_id = p.id;
      e.choice_index = out.choice->selected_index;
      e.choice_label = out.choice->selected_label;
      e.reasoning = out.choice->reasoning;
      e.frontiers = std::move(reps);
      return req.candidates[static_cast<std::size_t>(out.choice->selected_index)];
    }
    TraceEvent& e = emit(EventKind::Fallback);
    e.request_id = p.id;
    e.frontiers = std::move(reps);
    if (req.candidates.empty()) {
      e.detail = out.error.empty() ? "no candidates" : out.error;
      return std::nullopt;
    }
    const FrontierChoice fb = nearest_frontier_choice(req, out.error);
    e.detail = out.error;
    e.choice_index = fb.selected_index;
    e.choice_label = fb.selected_label;
    e.reasoning = fb.reasoning;
    return req.candidates[static_cast<std::size_t>(fb.selected_index)];
  }

  void close_pending_at_end() {
    Pending p = std::move(*pending_);
    pending_.reset();
    p.reply.wait();
    TraceEvent& e = emit(EventKind::Fallback);
    e.request_id = p.id;
    e.detail = "episode ended before the reply arrived";
  }

  // ---- waypoint execution ----

  bool plan_to(Point target, std::vector<Point>& nodes) {
    PlanResult plan = astar(map_, state_.pose.position(), target);
    if (!plan) return false;
    nodes = interpolate(plan.path, cfg_.interp).nodes;
    return true;
  }

  void execute_waypoint(const Candidate& c) {
    std::vector<Point> nodes;
    const bool ok = plan_to(c.target, nodes);
    {
      TraceEvent& e = emit(EventKind::WaypointBegin);
      e.choice_label = c.label;
      e.plan = nodes;
      e.detail = fmt::format("target={:.3f},{:.3f}", c.target.x, c.target.y);
    }
    const std::string reason = ok ? follow(c.target, nodes) : "unreachable";
    emit(EventKind::WaypointEnd).detail = reason;
  }

  std::string follow(Point target, std::vector<Point>& nodes) {
    const double reach = spec_.grid.frame().resolution;
    std::size_t idx = nodes.size() > 1 ? 1 : 0;
    int replans = 0;
    int budget = 3 * static_cast<int>(nodes.size()) * 2 + 48;
    while (true) {
      if (distance(state_.pose.position(), target) <= reach + 1e-9) return "reached";
      if (done()) return "terminated";
      if (budget-- <= 0) return "stalled";
      while (idx + 1 < nodes.size() && distance(state_.pose.position(), nodes[idx]) <= kNodeReached) ++idx;
      const Point goal = nodes[idx];
      const double dx = goal.x - state_.pose.x;
      const double dy = goal.y - state_.pose.y;
      Action a = Action::MoveForward;
      if (dx != 0.0 || dy != 0.0) {
        const double desired = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
        const double delta = heading_delta(state_.pose.heading_deg, desired);
        if (std::abs(delta) >= kHeadingTolerance) a = delta > 0 ? Action::TurnLeft : Action::TurnRight;
      }
      world_step(a);
      emit(EventKind::WaypointStep).action = a;
      if (a == Action::MoveForward && state_.collided) {
        if (cfg_.follow == WaypointFollow::Strict) return "blocked";
        if (replans++ >= cfg_.max_replans || !plan_to(target, nodes)) return "blocked";
        idx = nodes.size() > 1 ? 1 : 0;
        budget = 3 * static_cast<int>(nodes.size()) * 2 + 48;
      }
    }
  }

  void resume_fast() {
    chunk_.clear();
    note_.clear();
    fast_.on_resume();
  }

  // ---- loops ----

  void run_dual() {
    while (!done()) {
      if (pending_ && fast_steps_ - pending_->issued_at >= cfg_.latency_l) {
        if (auto target = resolve_pending()) {
          execute_waypoint(*target);
          resume_fast();
        }
        continue;
      }
      if (chunk_.empty()) {
        FastDecision d = ask_fast();
        chunk_.assign(d.actions.begin(), d.actions.end());
        note_ = std::move(d.note);
      }
      const Action a = chunk_.front();
      chunk_.pop_front();
      ++fast_steps_;
      world_step(a);
      TraceEvent& e = emit(a == Action::Stop ? EventKind::Stop : EventKind::FastAction);
      e.action = a;
      e.detail = std::exchange(note_, {});
      if (a == Action::Stop) break;
      if (slow_ != nullptr && !pending_ && fast_steps_ % cfg_.ratio_k == 0 && fast_steps_ != last_request_at_) {
        last_request_at_ = fast_steps_;
        issue_request();
      }
    }
  }

  void run_slow_only() {
    while (!done()) {
      FastDecision d = ask_fast();
      if (d.actions.front() == Action::Stop) {
        ++fast_steps_;
        world_step(Action::Stop);
        emit(EventKind::Stop).action = Action::Stop;
        break;
      }
      issue_request();
      for (int i = 0; i < cfg_.latency_l && !done(); ++i) {
        ++fast_steps_;
        world_step(Action::TurnLeft);
        TraceEvent& e = emit(EventKind::FastAction);
        e.action = Action::TurnLeft;
        e.detail = "filler";
      }
      if (done()) break;
      if (auto target = resolve_pending()) {
        execute_waypoint(*target);
        fast_.on_resume();
      } else {
        // Nothing to execute; rotate once so the next snapshot differs.
        ++fast_steps_;
        world_step(Action::TurnLeft);
        TraceEvent& e = emit(EventKind::FastAction);
        e.action = Action::TurnLeft;
        e.detail = "filler";
      }
    }
  }

  const EpisodeSpec& spec_;
  FastPolicy& fast_;
  SlowPlanner* slow_;
  const ScheduleConfig& cfg_;
  std::uint64_t seed_;
  OccupancyMap map_;
  AgentState state_;
  std::deque<Observation> history_;
  std::vector<Observation> history_buf_;
  std::vector<Point> path_;
  std::vector<TraceEvent> events_;
  std::deque<Action> chunk_;
  std::string note_;
  std::optional<Pending> pending_;
  int fast_steps_ = 0;
  int last_request_at_ = -1;
  int next_request_id_ = 0;
};

}  // namespace

EpisodeResult run_episode(const EpisodeSpec& spec, FastPolicy& fast, SlowPlanner* slow, const ScheduleConfig& cfg,
                          std::uint64_t seed) {
  validate(spec);
  validate(cfg);
  Episode episode(spec, fast, slow, cfg, seed);
  return episode.run();
}

std::vector<SuiteEntry> run_suite(const std::vector<std::pair<std::string, EpisodeSpec>>& scenarios,
                                  const PolicyFactory& policies, const ScheduleConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds) {
  if (!policies.fast) throw Error("suite needs a fast policy factory");
  std::vector<SuiteEntry> out;
  out.reserve(scenarios.size() * seeds.size());
  for (const auto& [name, spec] : scenarios) {
    for (std::uint64_t seed : seeds) {
      SuiteEntry entry{name, seed, spec, std::nullopt, {}};
      try {
        auto fast = policies.fast(spec);
        std::unique_ptr<SlowPlanner> slow = policies.slow ? policies.slow(spec) : nullptr;
        entry.result = run_episode(spec, *fast, slow.get(), cfg, seed);
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
      out.push_back(std::move(entry));
    }
  }
  return out;
}

std::vector<std::pair<std::string, EpisodeSpec>> load_scenario_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(fmt::format("{} is not a directory", dir.string()));
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, EpisodeSpec>> out;
  out.reserve(files.size());
  for (const auto& f : files) out.emplace_back(f.stem().string(), load_scenario(f));
  return out;
}

}  // namespace dualnav
