// dualnav: run, sweep and render fast/slow navigation episodes.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dualnav/commands.hpp"
#include "dualnav/remote.hpp"
#include "dualnav/scenario_gen.hpp"
#include "dualnav/scenario_io.hpp"

namespace {

using dualnav::RunConfig;

// Flag values land here; only flags the user actually passed override the
// config file.
struct RunFlags {
  std::vector<std::string> scenarios;
  std::string policy;
  std::string mode;
  int ratio = 0;
  int latency = 0;
  double p_err = 0;
  double tau = 0;
  double d = 0;
  std::string prune;
  std::string follow;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::string endpoint;
  double timeout = 0;
  double stub_latency = 0;
  std::string config;
  std::map<std::string, CLI::Option*> opts;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  f.opts["scenario"] = app->add_option("--scenario", f.scenarios, "Scenario file or directory (repeatable)");
  f.opts["policy"] = app->add_option("--policy", f.policy, "scripted (fast only), oracle or remote")
                         ->check(CLI::IsMember({"scripted", "oracle", "remote"}));
  f.opts["mode"] = app->add_option("--mode", f.mode, "dual or slow-only")->check(CLI::IsMember({"dual", "slow-only"}));
  f.opts["ratio"] = app->add_option("--ratio", f.ratio, "Fast steps per slow request");
  f.opts["latency"] = app->add_option("--latency", f.latency, "Fast steps before a slow reply arrives");
  f.opts["p_err"] = app->add_option("--p-err", f.p_err, "Wrong-branch probability at junctions");
  f.opts["tau"] = app->add_option("--tau", f.tau, "View pruning similarity threshold");
  f.opts["d"] = app->add_option("--d", f.d, "Path interpolation spacing in meters");
  f.opts["prune"] = app->add_option("--prune", f.prune, "last_kept or consecutive")
                        ->check(CLI::IsMember({"last_kept", "consecutive"}));
  f.opts["follow"] = app->add_option("--follow", f.follow, "strict or replan_on_block")
                         ->check(CLI::IsMember({"strict", "replan_on_block"}));
  f.opts["seeds"] = app->add_option("--seed", f.seeds, "Episode seeds, comma separated")->delimiter(',');
  f.opts["out"] = app->add_option("--out", f.out, "Output directory");
  f.opts["endpoint"] = app->add_option("--endpoint", f.endpoint, "Planner endpoint host:port (remote only)");
  f.opts["timeout_s"] = app->add_option("--timeout", f.timeout, "Remote planner timeout in seconds");
  f.opts["stub_latency_ms"] =
      app->add_option("--stub-latency-ms", f.stub_latency, "Wall-clock delay added to every slow planner call");
  app->add_option("--config", f.config, "JSON config file; flags take precedence")->check(CLI::ExistingFile);
}

void apply_json(RunConfig& cfg, const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) throw dualnav::Error(fmt::format("{}: config must be a JSON object", source));
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "scenarios") {
        cfg.scenarios.clear();
        for (const auto& s : v) cfg.scenarios.emplace_back(s.get<std::string>());
      } else if (key == "policy") {
        cfg.policy = dualnav::parse_policy(v.get<std::string>());
      } else if (key == "mode") {
        const auto m = v.get<std::string>();
        if (m != "dual" && m != "slow-only") throw dualnav::Error("mode must be dual or slow-only");
        cfg.mode = m == "dual" ? dualnav::ScheduleMode::Dual : dualnav::ScheduleMode::SlowOnly;
      } else if (key == "ratio") {
        cfg.ratio_k = v.get<int>();
      } else if (key == "latency") {
        cfg.latency_l = v.get<int>();
      } else if (key == "p_err") {
        cfg.p_err = v.get<double>();
      } else if (key == "tau") {
        cfg.tau = v.get<double>();
      } else if (key == "d") {
        cfg.d = v.get<double>();
      } else if (key == "prune") {
        const auto m = v.get<std::string>();
        if (m != "last_kept" && m != "consecutive") throw dualnav::Error("prune must be last_kept or consecutive");
        cfg.prune = m == "last_kept" ? dualnav::PruneMode::LastKept : dualnav::PruneMode::Consecutive;
      } else if (key == "follow") {
        const auto m = v.get<std::string>();
        if (m != "strict" && m != "replan_on_block") throw dualnav::Error("follow must be strict or replan_on_block");
        cfg.follow = m == "strict" ? dualnav::WaypointFollow::Strict : dualnav::WaypointFollow::ReplanOnBlock;
      } else if (key == "seeds") {
        cfg.seeds = v.get<std::vector<std::uint64_t>>();
      } else if (key == "out") {
        cfg.out = v.get<std::string>();
      } else if (key == "endpoint") {
        cfg.endpoint = v.get<std::string>();
      } else if (key == "timeout_s") {
        cfg.timeout_s = v.get<double>();
      } else if (key == "stub_latency_ms") {
        cfg.stub_latency_ms = v.get<double>();
      } else {
        throw dualnav::Error("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw dualnav::Error(fmt::format("{}: key '{}': {}", source, key, e.what()));
    } catch (const dualnav::Error& e) {
      throw dualnav::Error(fmt::format("{}: key '{}': {}", source, key, e.what()));
    }
  }
}

RunConfig resolve(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw dualnav::Error(fmt::format("{}: invalid JSON", f.config));
    apply_json(cfg, j, f.config);
  }
  auto given = [&](const char* key) {
    const auto it = f.opts.find(key);
    return it != f.opts.end() && it->second->count() > 0;
  };
  if (given("scenario")) cfg.scenarios.assign(f.scenarios.begin(), f.scenarios.end());
  if (given("policy")) cfg.policy = dualnav::parse_policy(f.policy);
  if (given("mode")) cfg.mode = f.mode == "dual" ? dualnav::ScheduleMode::Dual : dualnav::ScheduleMode::SlowOnly;
  if (given("ratio")) cfg.ratio_k = f.ratio;
  if (given("latency")) cfg.latency_l = f.latency;
  if (given("p_err")) cfg.p_err = f.p_err;
  if (given("tau")) cfg.tau = f.tau;
  if (given("d")) cfg.d = f.d;
  if (given("prune")) cfg.prune = f.prune == "last_kept" ? dualnav::PruneMode::LastKept : dualnav::PruneMode::Consecutive;
  if (given("follow")) {
    cfg.follow = f.follow == "strict" ? dualnav::WaypointFollow::Strict : dualnav::WaypointFollow::ReplanOnBlock;
  }
  if (given("seeds")) cfg.seeds = f.seeds;
  if (given("out")) cfg.out = f.out;
  if (given("endpoint")) cfg.endpoint = f.endpoint;
  if (given("timeout_s")) cfg.timeout_s = f.timeout;
  if (given("stub_latency_ms")) cfg.stub_latency_ms = f.stub_latency;
  if (const char* token = std::getenv("DUALNAV_ENDPOINT_TOKEN")) cfg.token = token;
  return cfg;
}

void print_effective(const RunConfig& cfg) {
  std::cerr << "effective config: " << dualnav::config_to_json(cfg).dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast/slow frontier navigation on occupancy grids"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run episodes and write logs, SVGs and metrics");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  std::vector<int> ratios{10, 20, 30};
  auto* sweep = app.add_subcommand("sweep", "Compare fast-only, slow-only and dual runs at several ratios");
  add_run_flags(sweep, sweep_flags);
  sweep->remove_option(sweep->get_option("--ratio"));
  sweep_flags.opts.erase("ratio");
  sweep->add_option("--ratio", ratios, "Ratios to compare, comma separated")->delimiter(',');

  std::vector<std::string> render_logs;
  std::string render_out = "render";
  auto* render = app.add_subcommand("render", "Render SVG and PPM files from trajectory logs");
  render->add_option("--log", render_logs, "Trajectory log file or directory")->required();
  render->add_option("--out", render_out, "Output directory");

  dualnav::GenSpec gen;
  int gen_count = 1;
  std::string gen_out = "scenarios";
  auto* generate = app.add_subcommand("generate", "Generate maze scenarios");
  generate->add_option("--seed", gen.seed, "First seed; scenario i uses seed + i");
  generate->add_option("--count", gen_count, "Number of scenarios")->check(CLI::PositiveNumber);
  generate->add_option("--size", gen.size, "Cells per side");
  generate->add_option("--rooms", gen.room_count, "Rooms to add");
  generate->add_option("--corridor-width", gen.corridor_width, "Corridor width in cells");
  generate->add_option("--junctions", gen.junction_target, "Target junction count");
  generate->add_option("--min-geodesic", gen.min_geodesic, "Minimum start-goal geodesic in meters");
  generate->add_option("--out", gen_out, "Output directory");

  RunFlags record_flags;
  std::string record_fixture = "fixture.json";
  auto* record = app.add_subcommand("record", "Record a replay fixture against the built-in mock planner");
  add_run_flags(record, record_flags);
  record->add_option("--fixture", record_fixture, "Fixture file to write");

  std::string fixture_path;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8765;
  auto* serve_fixture = app.add_subcommand("serve-fixture", "Serve a recorded fixture over HTTP");
  serve_fixture->add_option("--fixture", fixture_path, "Fixture file")->required()->check(CLI::ExistingFile);
  serve_fixture->add_option("--host", serve_host, "Bind address");
  serve_fixture->add_option("--port", serve_port, "Port");

  std::string mock_scenario;
  auto* serve_mock = app.add_subcommand("serve-mock", "Serve the oracle-backed mock planner over HTTP");
  serve_mock->add_option("--scenario", mock_scenario, "Scenario the mock knows the goal of")
      ->required()
      ->check(CLI::ExistingFile);
  serve_mock->add_option("--host", serve_host, "Bind address");
  serve_mock->add_option("--port", serve_port, "Port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const RunConfig cfg = resolve(run_flags);
      print_effective(cfg);
      return dualnav::cmd_run(cfg, std::cout, std::cerr);
    }
    if (*sweep) {
      RunConfig cfg = resolve(sweep_flags);
      print_effective(cfg);
      return dualnav::cmd_sweep(cfg, ratios, std::cout, std::cerr);
    }
    if (*render) {
      std::vector<std::filesystem::path> logs(render_logs.begin(), render_logs.end());
      return dualnav::cmd_render(logs, render_out, std::cout, std::cerr);
    }
    if (*generate) {
      std::filesystem::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        dualnav::GenSpec s = gen;
        s.seed = gen.seed + static_cast<std::uint64_t>(i);
        const auto g = dualnav::generate(s);
        const auto path = std::filesystem::path(gen_out) / fmt::format("maze_{:03d}.json", i);
        dualnav::save_scenario(g.spec, path);
        std::cout << fmt::format("{}: geodesic {:.2f} m, {} junctions\n", path.string(), g.geodesic_m, g.junctions);
      }
      return 0;
    }
    if (*record) {
      const RunConfig cfg = resolve(record_flags);
      print_effective(cfg);
      return dualnav::cmd_record(cfg, record_fixture, std::cout, std::cerr);
    }
    if (*serve_fixture) {
      dualnav::FixtureService service(dualnav::load_fixture(fixture_path));
      dualnav::PlannerServer server([&service](const std::string& body) { return service.handle(body); });
      std::cerr << fmt::format("serving {} on http://{}:{}/plan\n", fixture_path, serve_host, serve_port);
      server.serve_forever(serve_host, serve_port);
      return 0;
    }
    if (*serve_mock) {
      const auto spec = dualnav::load_scenario(mock_scenario);
      dualnav::MockPlannerService service(spec);
      dualnav::PlannerServer server([&service](const std::string& body) { return service.handle(body); });
      std::cerr << fmt::format("serving mock planner on http://{}:{}/plan\n", serve_host, serve_port);
      server.serve_forever(serve_host, serve_port);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
