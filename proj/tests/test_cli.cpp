#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "dualnav/commands.hpp"
#include "dualnav/scenario_gen.hpp"
#include "dualnav/scenario_io.hpp"
#include "dualnav/trajectory_log.hpp"
#include "support.hpp"

using namespace dualnav;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EpisodeSpec room_spec(int budget) {
  EpisodeSpec s;
  s.grid = testsupport::grid({"########", "#......#", "#......#", "#......#", "########"});
  s.start = Pose{0.25, 0.25, 0};
  s.goal = Point{1.5, 0.75};
  s.success_radius = 0.1;
  s.max_steps = budget;
  return s;
}

std::string three_step_log() {
  const EpisodeSpec spec = room_spec(3);
  ReplayFastPolicy fast({Action::MoveForward, Action::TurnLeft, Action::MoveForward});
  const EpisodeResult r = run_episode(spec, fast, nullptr, ScheduleConfig{}, 0);
  REQUIRE(r.step_count == 3);
  LogHeader h;
  h.scenario_name = "room";
  h.spec = spec;
  return format_trajectory_log(h, r);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dualnav_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a three-step log renders four trajectory points") {
  const std::string text = three_step_log();
  std::istringstream in(text);
  std::vector<std::string> warnings;
  const TrajectoryLog log = parse_trajectory_log(in, warnings);
  CHECK(warnings.empty());
  REQUIRE(log.result.has_value());
  CHECK(log.result->step_count == 3);
  const SvgScene scene = scene_from_log(log);
  CHECK(scene.trajectory.size() == 4);
  const std::string svg = render_svg(scene);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex(R"re(<path id="trajectory" d="([^"]*)")re")));
  const std::string d = m[1];
  CHECK(std::count(d.begin(), d.end(), ',') == 4);
}

TEST_CASE("truncated logs warn and malformed lines name the line") {
  const std::string text = three_step_log();
  // Drop the trailing newline and half of the last record.
  const std::size_t cut = text.rfind('\n', text.size() - 2) + 10;
  std::istringstream truncated(text.substr(0, cut));
  std::vector<std::string> warnings;
  const TrajectoryLog log = parse_trajectory_log(truncated, warnings, "run.jsonl");
  CHECK_FALSE(log.result.has_value());
  CHECK(warnings.size() >= 1);
  CHECK(warnings.front().find("truncated") != std::string::npos);

  std::string broken = text;
  const std::size_t second = broken.find('\n') + 1;
  broken.insert(second, "{not json}\n");
  std::istringstream bad(broken);
  try {
    parse_trajectory_log(bad, warnings, "run.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("run.jsonl:2:", 0) == 0);
  }
}

TEST_CASE("log round trip keeps every event") {
  const EpisodeSpec spec = room_spec(30);
  ReplayFastPolicy fast({Action::TurnLeft, Action::MoveForward});
  OracleSlowPlanner slow(spec);
  ScheduleConfig cfg;
  cfg.ratio_k = 5;
  cfg.latency_l = 2;
  const EpisodeResult r = run_episode(spec, fast, &slow, cfg, 0);
  LogHeader h;
  h.scenario_name = "room";
  h.spec = spec;
  std::istringstream in(format_trajectory_log(h, r));
  std::vector<std::string> warnings;
  const TrajectoryLog log = parse_trajectory_log(in, warnings);
  REQUIRE(log.events.size() == r.trace.events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    CHECK(log.events[i].kind == r.trace.events[i].kind);
    CHECK(log.events[i].fast_step == r.trace.events[i].fast_step);
    CHECK(log.events[i].plan == r.trace.events[i].plan);
  }
  CHECK(scene_from_log(log).trajectory == r.path);
}

TEST_CASE("run is byte-for-byte reproducible") {
  const fs::path dir = scratch("repro");
  fs::create_directories(dir / "scenarios");
  for (std::uint64_t s = 0; s < 2; ++s) {
    GenSpec g;
    g.seed = s;
    save_scenario(generate(g).spec, dir / "scenarios" / ("maze_" + std::to_string(s) + ".json"));
  }
  RunConfig cfg;
  cfg.scenarios = {dir / "scenarios"};
  cfg.policy = PolicyKind::Oracle;
  cfg.seeds = {0, 1};
  std::ostringstream info, err;
  cfg.out = dir / "out";
  REQUIRE(cmd_run(cfg, info, err) == 0);
  fs::copy(dir / "out", dir / "a", fs::copy_options::recursive);
  REQUIRE(cmd_run(cfg, info, err) == 0);
  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file() || e.path().stem() == "timing") continue;
    const fs::path rel = fs::relative(e.path(), dir / "a");
    CHECK(slurp(e.path()) == slurp(dir / "out" / rel));
    ++compared;
  }
  CHECK(compared == 2 + 4 * 2);
  fs::remove_all(dir);
}

TEST_CASE("render reproduces the run svg") {
  const fs::path dir = scratch("render");
  save_scenario(room_spec(40), dir / "room.json");
  RunConfig cfg;
  cfg.scenarios = {dir / "room.json"};
  cfg.ratio_k = 5;
  cfg.latency_l = 2;
  cfg.out = dir / "out";
  std::ostringstream info, err;
  REQUIRE(cmd_run(cfg, info, err) == 0);
  REQUIRE(cmd_render({dir / "out" / "episodes"}, dir / "render", info, err) == 0);
  CHECK(slurp(dir / "out" / "episodes" / "room_s0.svg") == slurp(dir / "render" / "room_s0.svg"));
  CHECK(fs::exists(dir / "render" / "room_s0.ppm"));
  fs::remove_all(dir);
}

TEST_CASE("run config validation") {
  auto base = [] {
    RunConfig c;
    c.scenarios = {"x"};
    return c;
  };
  CHECK_NOTHROW(validate(base()));
  RunConfig cfg = base();
  cfg.latency_l = 25;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = base();
  cfg.p_err = 1.5;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = base();
  cfg.policy = PolicyKind::Remote;
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK_THROWS_AS(validate(RunConfig{}), Error);
  CHECK(parse_policy("scripted") == PolicyKind::Scripted);
  CHECK_THROWS_AS(parse_policy("magic"), Error);
  cfg = base();
  cfg.token = "secret";
  CHECK(config_to_json(cfg).dump().find("secret") == std::string::npos);
}

}
