#include <doctest.h>

#include <random>
#include <sstream>

#include "dualnav/scenario_io.hpp"
#include "dualnav/world.hpp"
#include "support.hpp"

using namespace dualnav;

namespace {

EpisodeSpec corridor_spec() {
  EpisodeSpec s;
  s.grid = testsupport::grid({
      "#######",
      "#.....#",
      "#.###.#",
      "#.....#",
      "#######",
  });
  s.start = Pose{0.25, 0.25, 0};
  s.goal = Point{1.25, 0.75};
  s.instruction = "go";
  s.max_steps = 20;
  s.success_radius = 0.3;
  return s;
}

}  // namespace

TEST_SUITE("world") {

TEST_CASE("headings") {
  CHECK(normalize_heading(-15) == 345);
  CHECK(normalize_heading(720) == 0);
  CHECK(valid_heading(345));
  CHECK_FALSE(valid_heading(10));
  CHECK_FALSE(valid_heading(360));
  CHECK(heading_vector(90) == Point{0.0, 1.0});
  CHECK(heading_vector(180) == Point{-1.0, 0.0});
  CHECK(snap_heading(8.0) == 15);
  CHECK(snap_heading(-7.0) == 0);
  CHECK(snap_heading(359.0) == 0);
  CHECK(heading_delta(350.0, 10.0) == doctest::Approx(20.0));
  CHECK(heading_delta(10.0, 350.0) == doctest::Approx(-20.0));
}

TEST_CASE("grid frame rounds to the nearest center") {
  GridFrame f{4, 4, 0.25};
  CHECK(f.cell_at({0.12, 0.0}) == f.index(0, 0));
  CHECK(f.cell_at({0.13, 0.0}) == f.index(1, 0));
  CHECK(f.cell_at({0.125, 0.0}) == f.index(1, 0));
  CHECK_FALSE(f.cell_at({-0.2, 0.0}).has_value());
  CHECK(f.center(f.index(2, 3)) == Point{0.5, 0.75});
}

TEST_CASE("ground truth requires an occupied border") {
  CHECK_THROWS_AS(testsupport::grid({"...", "#.#", "###"}), Error);
  CHECK_THROWS_AS(testsupport::grid({"###", "#x#", "###"}), Error);
  CHECK_NOTHROW(testsupport::grid({"###", "#.#", "###"}));
}

TEST_CASE("step kinematics and collisions") {
  EpisodeSpec s = corridor_spec();
  s.start = Pose{0.25, 0.25, 0};
  AgentState st = initial_state(s);
  st = step(st, Action::MoveForward, s.grid);
  CHECK(st.pose == Pose{0.5, 0.25, 0});
  CHECK_FALSE(st.collided);
  st = step(st, Action::TurnLeft, s.grid);
  CHECK(st.pose.heading_deg == 15);
  st = step(st, Action::TurnRight, s.grid);
  st = step(st, Action::TurnRight, s.grid);
  CHECK(st.pose.heading_deg == 345);
  for (int i = 0; i < 6; ++i) st = step(st, Action::TurnLeft, s.grid);
  st = step(st, Action::TurnLeft, s.grid);
  CHECK(st.pose.heading_deg == 90);
  // (0.5, 0.5) is a wall.
  const AgentState blocked = step(st, Action::MoveForward, s.grid);
  CHECK(blocked.collided);
  CHECK(blocked.pose == st.pose);
  CHECK(blocked.steps == st.steps + 1);
}

TEST_CASE("termination and success") {
  EpisodeSpec s = corridor_spec();
  AgentState st = initial_state(s);
  CHECK_FALSE(is_terminated(st, s));
  CHECK_THROWS_AS(is_success(st, s), Error);
  st = step(st, Action::Stop, s.grid);
  CHECK(st.stopped);
  CHECK(is_terminated(st, s));
  CHECK_FALSE(is_success(st, s));
  CHECK_THROWS_AS(step(st, Action::MoveForward, s.grid), Error);

  s.start = Pose{1.25, 0.25, 90};
  s.success_radius = 0.5;
  AgentState at_goal = step(initial_state(s), Action::Stop, s.grid);
  CHECK(is_success(at_goal, s));

  AgentState spent = initial_state(s);
  for (int i = 0; i < s.max_steps; ++i) spent = step(spent, Action::TurnLeft, s.grid);
  CHECK(is_terminated(spent, s));
  CHECK_FALSE(is_success(spent, s));
}

TEST_CASE("observation respects range, field of view and occlusion") {
  const auto g = testsupport::grid({
      "#########",
      "#.......#",
      "#.......#",
      "#...#...#",
      "#.......#",
      "#########",
  });
  const Pose pose{0.25, 0.75, 0};  // col 1, row 3, facing +x
  SensorConfig sensor{90.0, 5.0};
  const Observation obs = observe(pose, g, sensor);
  const GridFrame& f = g.frame();
  auto visible = [&](int c, int r) {
    for (const auto& v : obs.visible_cells) {
      if (v.index == f.index(c, r)) return true;
    }
    return false;
  };
  CHECK(visible(1, 3));  // own cell
  CHECK(visible(3, 3));
  CHECK(visible(4, 3));  // the wall itself
  CHECK_FALSE(visible(5, 3));  // behind the wall
  CHECK_FALSE(visible(0, 3));  // behind the agent
  CHECK(std::is_sorted(obs.visible_cells.begin(), obs.visible_cells.end(),
                       [](const auto& a, const auto& b) { return a.index < b.index; }));
  for (const auto& v : obs.visible_cells) CHECK(v.state == g.at(v.index));

  SensorConfig short_range{90.0, 0.3};
  const Observation near = observe(pose, g, short_range);
  for (const auto& v : near.visible_cells) CHECK(distance(f.center(v.index), pose.position()) <= 0.3 + 1e-9);
}

TEST_CASE("property: every visible cell lies in the sensor sector") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testsupport::random_grid(rng, 20, 20, 0.25);
    const GridFrame& f = g.frame();
    std::vector<int> free;
    for (int i = 0; i < f.cell_count(); ++i) {
      if (g.is_free(i)) free.push_back(i);
    }
    const int cell = free[rng() % free.size()];
    const Pose pose{f.center(cell).x, f.center(cell).y, static_cast<int>(rng() % 24) * 15};
    const SensorConfig sensor{90.0, 2.0};
    for (const auto& v : observe(pose, g, sensor).visible_cells) {
      if (v.index == cell) continue;
      const Point c = f.center(v.index);
      CHECK(distance(c, pose.position()) <= sensor.range_m + 1e-9);
      const double bearing = std::atan2(c.y - pose.y, c.x - pose.x) * 180.0 / M_PI;
      CHECK(std::abs(heading_delta(pose.heading_deg, bearing)) <= 45.0 + 1e-6);
    }
  }
}

TEST_CASE("scenario files round-trip and reject bad input") {
  const EpisodeSpec s = corridor_spec();
  const std::string text = scenario_to_string(s);
  const EpisodeSpec back = parse_scenario(text);
  CHECK(scenario_to_string(back) == text);
  CHECK(back.start == s.start);
  CHECK(back.goal == s.goal);

  auto error_of = [](const std::string& t) {
    try {
      parse_scenario(t, "x.json");
    } catch (const ScenarioError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("{").find("x.json") != std::string::npos);
  std::string unknown = text;
  unknown.insert(1, "\"colour\": 1,");
  CHECK(error_of(unknown).find("colour") != std::string::npos);
  std::string bad_start = text;
  const auto pos = bad_start.find("\"x\": 0.25");
  REQUIRE(pos != std::string::npos);
  bad_start.replace(pos, 9, "\"x\": \"a\"");
  CHECK(error_of(bad_start).find("start.x") != std::string::npos);

  EpisodeSpec wall_goal = s;
  wall_goal.goal = Point{0.5, 0.5};
  CHECK_THROWS_WITH_AS(validate(wall_goal), doctest::Contains("goal not free"), Error);
}

}
