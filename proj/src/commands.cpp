#include "dualnav/commands.hpp"

#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dualnav/remote.hpp"
#include "dualnav/render.hpp"
#include "dualnav/scenario_io.hpp"
#include "dualnav/trajectory_log.hpp"

namespace dualnav {

std::string_view policy_name(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::Scripted: return "scripted";
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Remote: return "remote";
  }
  return "scripted";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "scripted") return PolicyKind::Scripted;
  if (name == "oracle") return PolicyKind::Oracle;
  if (name == "remote") return PolicyKind::Remote;
  throw Error(fmt::format("unknown policy '{}' (expected scripted, oracle or remote)", name));
}

void validate(const RunConfig& cfg) {
  if (cfg.scenarios.empty()) throw Error("no scenario given");
  if (cfg.seeds.empty()) throw Error("no seed given");
  if (cfg.p_err < 0.0 || cfg.p_err > 1.0) throw Error("p_err must lie in [0, 1]");
  if (cfg.stub_latency_ms < 0.0) throw Error("stub latency must be non-negative");
  if (cfg.timeout_s <= 0.0) throw Error("timeout must be positive");
  if (cfg.policy == PolicyKind::Remote && cfg.endpoint.empty()) throw Error("--endpoint is required with --policy remote");
  if (cfg.policy != PolicyKind::Remote && !cfg.endpoint.empty()) {
    throw Error("--endpoint is only valid with --policy remote");
  }
  if (cfg.mode == ScheduleMode::SlowOnly && cfg.policy == PolicyKind::Scripted) {
    throw Error("slow-only mode needs a slow planner (oracle or remote)");
  }
  validate(schedule_config(cfg));
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  auto scen = nlohmann::ordered_json::array();
  for (const auto& s : cfg.scenarios) scen.push_back(s.generic_string());
  j["scenarios"] = std::move(scen);
  j["policy"] = policy_name(cfg.policy);
  j["mode"] = cfg.mode == ScheduleMode::Dual ? "dual" : "slow-only";
  j["ratio"] = cfg.ratio_k;
  j["latency"] = cfg.latency_l;
  j["p_err"] = cfg.p_err;
  j["tau"] = cfg.tau;
  j["d"] = cfg.d;
  j["prune"] = cfg.prune == PruneMode::LastKept ? "last_kept" : "consecutive";
  j["follow"] = cfg.follow == WaypointFollow::Strict ? "strict" : "replan_on_block";
  j["seeds"] = cfg.seeds;
  j["out"] = cfg.out.generic_string();
  if (cfg.policy == PolicyKind::Remote) {
    j["endpoint"] = cfg.endpoint;
    j["timeout_s"] = cfg.timeout_s;
  }
  j["stub_latency_ms"] = cfg.stub_latency_ms;
  return j;
}

ScheduleConfig schedule_config(const RunConfig& cfg) {
  ScheduleConfig s;
  s.ratio_k = cfg.ratio_k;
  s.latency_l = cfg.latency_l;
  s.mode = cfg.mode;
  s.follow = cfg.follow;
  s.views.tau = cfg.tau;
  s.views.prune_mode = cfg.prune;
  s.interp.d = cfg.d;
  return s;
}

PolicyFactory policy_factory(const RunConfig& cfg) {
  PolicyFactory f;
  const ScriptedConfig scripted{cfg.p_err, 4, 40};
  f.fast = [scripted](const EpisodeSpec& spec) { return std::make_unique<ScriptedFastPolicy>(spec, scripted); };
  const auto delay = std::chrono::microseconds(static_cast<long long>(cfg.stub_latency_ms * 1000.0));
  auto wrap = [delay](std::unique_ptr<SlowPlanner> p) -> std::unique_ptr<SlowPlanner> {
    if (delay.count() == 0) return p;
    return std::make_unique<LatencyStubPlanner>(std::shared_ptr<SlowPlanner>(std::move(p)), delay);
  };
  switch (cfg.policy) {
    case PolicyKind::Scripted:
      break;
    case PolicyKind::Oracle:
      f.slow = [wrap](const EpisodeSpec& spec) { return wrap(std::make_unique<OracleSlowPlanner>(spec)); };
      break;
    case PolicyKind::Remote: {
      RemoteConfig rc{cfg.endpoint, cfg.timeout_s, cfg.token};
      f.slow = [wrap, rc](const EpisodeSpec&) { return wrap(std::make_unique<RemoteSlowPlanner>(rc)); };
      break;
    }
  }
  return f;
}

std::vector<std::pair<std::string, EpisodeSpec>> collect_scenarios(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::pair<std::string, EpisodeSpec>> out;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      auto dir = load_scenario_dir(p);
      if (dir.empty()) throw Error(fmt::format("{} contains no scenario files", p.string()));
      for (auto& s : dir) out.push_back(std::move(s));
    } else {
      out.emplace_back(p.stem().string(), load_scenario(p));
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw Error(fmt::format("write failed for {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

EpisodeArtifacts episode_artifacts(const std::string& name, std::uint64_t seed, const EpisodeSpec& spec,
                                   const EpisodeResult& result, const RunConfig& cfg) {
  LogHeader header{name, seed, spec, schedule_config(cfg).sensor, config_to_json(cfg)};
  EpisodeArtifacts a;
  a.log = format_trajectory_log(header, result);
  std::istringstream in(a.log);
  std::vector<std::string> warnings;
  a.svg = render_svg(scene_from_log(parse_trajectory_log(in, warnings, name)));
  return a;
}

namespace {

std::string episode_stem(const std::string& name, std::uint64_t seed) { return fmt::format("{}_s{}", name, seed); }

std::string csv_text(std::span<const EpisodeRecord> records, bool with_time) {
  std::ostringstream s;
  write_metrics_csv(s, records, with_time);
  return s.str();
}

std::string json_text(std::span<const EpisodeRecord> records, bool with_time) {
  std::ostringstream s;
  write_metrics_json(s, records, with_time);
  return s.str();
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& info, std::ostream& err) {
  try {
    validate(cfg);
    const auto scenarios = collect_scenarios(cfg.scenarios);
    std::filesystem::create_directories(cfg.out / "episodes");
    const auto entries = run_suite(scenarios, policy_factory(cfg), schedule_config(cfg), cfg.seeds);
    std::vector<EpisodeRecord> records;
    int aborted = 0;
    for (const SuiteEntry& e : entries) {
      if (!e.result) {
        ++aborted;
        err << fmt::format("error: {} seed {}: {}\n", e.scenario, e.seed, e.error);
        continue;
      }
      const std::string stem = episode_stem(e.scenario, e.seed);
      const EpisodeArtifacts a = episode_artifacts(e.scenario, e.seed, e.spec, *e.result, cfg);
      write_file_atomic(cfg.out / "episodes" / (stem + ".jsonl"), a.log);
      write_file_atomic(cfg.out / "episodes" / (stem + ".svg"), a.svg);
      EpisodeRecord rec = episode_metrics(*e.result, e.spec);
      rec.scenario = e.scenario;
      rec.seed = e.seed;
      records.push_back(rec);
      info << fmt::format("{} seed {}: {} in {} steps, {} slow requests\n", e.scenario, e.seed,
                          e.result->success ? "success" : "failure", e.result->step_count,
                          e.result->trace.count(EventKind::SlowRequest));
    }
    if (!records.empty()) {
      write_file_atomic(cfg.out / "metrics.csv", csv_text(records, false));
      write_file_atomic(cfg.out / "metrics.json", json_text(records, false));
      write_file_atomic(cfg.out / "timing.csv", csv_text(records, true));
      write_file_atomic(cfg.out / "timing.json", json_text(records, true));
      const MetricsReport r = aggregate(records);
      info << fmt::format("episodes {}  SR {:.3f}  OS {:.3f}  SPL {:.3f}  nDTW {:.3f}  NE {:.2f} m  AT {:.3f} s\n",
                          r.n_episodes, r.sr, r.os, r.spl, r.ndtw, r.ne_m, r.at_s);
    }
    return aborted == 0 && !records.empty() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<SweepRow> sweep_rows(const std::vector<std::pair<std::string, EpisodeSpec>>& scenarios,
                                 const RunConfig& cfg, const std::vector<int>& ratios) {
  struct Setting {
    std::string label;
    RunConfig cfg;
  };
  std::vector<Setting> settings;
  RunConfig fast_only = cfg;
  fast_only.policy = PolicyKind::Scripted;
  fast_only.endpoint.clear();
  settings.push_back({"fast only", fast_only});
  RunConfig slow_only = cfg;
  slow_only.mode = ScheduleMode::SlowOnly;
  settings.push_back({"slow only", slow_only});
  for (int k : ratios) {
    RunConfig dual = cfg;
    dual.mode = ScheduleMode::Dual;
    dual.ratio_k = k;
    settings.push_back({fmt::format("{}:1", k), dual});
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const RunConfig& c = settings[i].cfg;
    const auto entries = run_suite(scenarios, policy_factory(c), schedule_config(c), c.seeds);
    std::vector<EpisodeRecord> records;
    SweepRow row;
    row.row = fmt::format("({})", static_cast<char>('a' + i));
    row.setting = settings[i].label;
    for (const auto& e : entries) {
      if (!e.result) {
        ++row.aborted;
        continue;
      }
      records.push_back(episode_metrics(*e.result, e.spec));
    }
    if (!records.empty()) row.report = aggregate(records);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << fmt::format("{:<4} {:<10} {:>7} {:>7} {:>7} {:>7} {:>7} {:>9}\n", "row", "setting", "NE", "OS", "SR", "SPL",
                     "nDTW", "AT");
  for (const auto& r : rows) {
    const auto& m = r.report;
    out << fmt::format("{:<4} {:<10} {:>7.2f} {:>7.1f} {:>7.1f} {:>7.1f} {:>7.1f} {:>9.4f}", r.row, r.setting, m.ne_m,
                       100.0 * m.os, 100.0 * m.sr, 100.0 * m.spl, 100.0 * m.ndtw, m.at_s);
    if (r.aborted > 0) out << fmt::format("  ({} aborted)", r.aborted);
    out << '\n';
  }
}

int cmd_sweep(const RunConfig& cfg, const std::vector<int>& ratios, std::ostream& info, std::ostream& err) {
  try {
    if (ratios.size() < 2) throw Error("sweep needs at least two ratios");
    if (cfg.policy == PolicyKind::Scripted) throw Error("sweep needs a slow planner (oracle or remote)");
    for (int k : ratios) {
      RunConfig c = cfg;
      c.ratio_k = k;
      validate(c);
    }
    const auto scenarios = collect_scenarios(cfg.scenarios);
    const auto rows = sweep_rows(scenarios, cfg, ratios);
    std::ostringstream table;
    write_sweep_table(table, rows);
    info << table.str();
    std::filesystem::create_directories(cfg.out);
    write_file_atomic(cfg.out / "sweep.txt", table.str());
    std::ostringstream csv;
    csv << "row,setting,ne_m,os,sr,spl,ndtw,at_s,episodes,aborted\n";
    int aborted = 0;
    for (const auto& r : rows) {
      const auto& m = r.report;
      csv << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.row, r.setting, m.ne_m, m.os,
                         m.sr, m.spl, m.ndtw, m.at_s, m.n_episodes, r.aborted);
      aborted += r.aborted;
    }
    write_file_atomic(cfg.out / "sweep.csv", csv.str());
    return aborted == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_render(const std::vector<std::filesystem::path>& logs, const std::filesystem::path& out_dir,
               std::ostream& info, std::ostream& err) {
  try {
    std::vector<std::filesystem::path> files;
    for (const auto& p : logs) {
      if (std::filesystem::is_directory(p)) {
        std::vector<std::filesystem::path> found;
        for (const auto& e : std::filesystem::directory_iterator(p)) {
          if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path());
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      } else {
        files.push_back(p);
      }
    }
    if (files.empty()) throw Error("no trajectory logs given");
    std::filesystem::create_directories(out_dir);
    for (const auto& f : files) {
      std::vector<std::string> warnings;
      const TrajectoryLog log = read_trajectory_log(f, warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      const SvgScene scene = scene_from_log(log);
      const std::string stem = f.stem().string();
      write_file_atomic(out_dir / (stem + ".svg"), render_svg(scene));
      write_file_atomic(out_dir / (stem + ".ppm"), map_to_ppm(scene.map, detect_frontiers(scene.map)));
      info << fmt::format("{} -> {}\n", f.string(), (out_dir / (stem + ".svg")).string());
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_record(const RunConfig& cfg, const std::filesystem::path& fixture_path, std::ostream& info,
               std::ostream& err) {
  try {
    const auto scenarios = collect_scenarios(cfg.scenarios);
    if (scenarios.empty()) throw Error("no scenario given");
    const auto& [name, spec] = scenarios.front();
    const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
    MockPlannerService mock(spec);
    PlannerServer server([&mock](const std::string& body) { return mock.handle(body); });
    server.start();
    RemoteSlowPlanner planner(RemoteConfig{server.endpoint(), cfg.timeout_s, {}});
    Fixture fixture;
    fixture.mode = FixtureMode::Strict;
    fixture.description = fmt::format("scenario {} seed {} ratio {} latency {}", name, seed, cfg.ratio_k, cfg.latency_l);
    std::mutex mu;
    planner.set_recorder([&](const Exchange& x) {
      std::lock_guard lock(mu);
      fixture.exchanges.push_back({x.request_hash, x.stage, x.status, x.body, 0});
    });
    ScriptedFastPolicy fast(spec, ScriptedConfig{cfg.p_err, 4, 40});
    const EpisodeResult result = run_episode(spec, fast, &planner, schedule_config(cfg), seed);
    server.stop();
    for (const auto& e : result.trace.events) {
      if (e.kind == EventKind::SlowArrival) fixture.choices.push_back({e.choice_index, e.choice_label, e.reasoning});
    }
    if (fixture.exchanges.empty()) throw Error("episode issued no slow requests; nothing to record");
    if (fixture_path.has_parent_path()) std::filesystem::create_directories(fixture_path.parent_path());
    save_fixture(fixture, fixture_path);
    info << fmt::format("recorded {} exchanges, {} choices -> {}\n", fixture.exchanges.size(), fixture.choices.size(),
                        fixture_path.string());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dualnav
