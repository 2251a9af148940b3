#include <doctest.h>

#include <filesystem>

#include "dualnav/remote.hpp"
#include "dualnav/scheduler.hpp"
#include "dualnav/scenario_gen.hpp"
#include "dualnav/wire.hpp"

using namespace dualnav;

namespace {

SlowErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SlowPlannerError& e) {
    return e.kind();
  }
  FAIL("expected SlowPlannerError");
  return SlowErrorKind::Transport;
}

PlanRequest sample_request(const EpisodeSpec& spec) {
  OccupancyMap m(spec.grid.frame());
  m.apply(observe(spec.start, spec.grid, SensorConfig{}));
  return build_plan_request(m, spec.start, spec.instruction, ScheduleConfig{});
}

GeneratedScenario maze() {
  GenSpec g;
  g.seed = 3;
  return generate(g);
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("base64 round trip and known vectors") {
  CHECK(wire::base64_encode("") == "");
  CHECK(wire::base64_encode("f") == "Zg==");
  CHECK(wire::base64_encode("foobar") == "Zm9vYmFy");
  CHECK(wire::base64_decode("Zm9vYg==") == "foob");
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
  CHECK(wire::base64_decode(wire::base64_encode(bytes)) == bytes);
  CHECK_THROWS_AS(wire::base64_decode("Zm9v!"), Error);
  CHECK_THROWS_AS(wire::base64_decode("Zm9"), Error);
}

TEST_CASE("fnv1a64 known values") {
  CHECK(wire::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(wire::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(wire::hash_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("stage 2 replies") {
  const auto c = wire::parse_stage2_reply(R"({"Selected waypoint":"F3","Reasoning":"leads to the kitchen"})", 4);
  CHECK(c.selected_index == 2);
  CHECK(c.selected_label == "F3");
  CHECK(c.reasoning == "leads to the kitchen");
  CHECK(wire::parse_stage2_reply(R"([{"Selected waypoint":"F1","Reasoning":"r"}])", 1).selected_index == 0);
  CHECK(wire::parse_stage2_reply(R"([ "Selected waypoint": "F2", "Reasoning": "r" ])", 2).selected_index == 1);
  CHECK(kind_of([] { wire::parse_stage2_reply(R"({"Selected waypoint":"F9","Reasoning":"r"})", 4); }) ==
        SlowErrorKind::InvalidSelection);
  CHECK(kind_of([] { wire::parse_stage2_reply(R"({"Selected waypoint":"north","Reasoning":"r"})", 4); }) ==
        SlowErrorKind::InvalidSelection);
  CHECK(kind_of([] { wire::parse_stage2_reply(R"({"Selected waypoint":"F1"})", 4); }) ==
        SlowErrorKind::MalformedReply);
  CHECK(kind_of([] { wire::parse_stage2_reply("not json", 4); }) == SlowErrorKind::MalformedReply);
}

TEST_CASE("stage 1 replies name the missing field") {
  const auto s = wire::parse_stage1_reply(
      R"({"Location":"hall","Relationship":"door ahead","Possible directions":"left, right"})");
  CHECK(s == wire::EnvSummary{"hall", "door ahead", "left, right"});
  try {
    wire::parse_stage1_reply(R"({"Location":"hall","Possible directions":"left"})");
    FAIL("expected an error");
  } catch (const SlowPlannerError& e) {
    CHECK(e.kind() == SlowErrorKind::MalformedReply);
    CHECK(std::string(e.what()).find("Relationship") != std::string::npos);
  }
}

TEST_CASE("request payloads") {
  const auto g = maze();
  const PlanRequest req = sample_request(g.spec);
  REQUIRE(!req.candidates.empty());
  const auto s1 = wire::stage1_request(req);
  CHECK(s1["stage"] == 1);
  CHECK(s1["prompt"] == std::string(wire::stage1_prompt()));
  CHECK(wire::base64_decode(s1["topdown_image"].get<std::string>()).rfind("P6", 0) == 0);
  const auto s2 = wire::stage2_request(req, {"a", "b", "c"});
  CHECK(s2["summary"]["Possible directions"] == "c");
  REQUIRE(s2["candidates"].size() == req.candidates.size());
  for (std::size_t i = 0; i < req.candidates.size(); ++i) {
    CHECK(s2["candidates"][i]["label"] == frontier_label(static_cast<int>(i)));
    CHECK(s2["candidates"][i]["views"].size() == req.candidates[i].kept.size());
  }
}

}

TEST_SUITE("remote") {

TEST_CASE("mock endpoint agrees with the oracle") {
  const auto g = maze();
  const PlanRequest req = sample_request(g.spec);
  MockPlannerService mock(g.spec);
  PlannerServer server([&](const std::string& b) { return mock.handle(b); });
  server.start();
  RemoteSlowPlanner remote(RemoteConfig{server.endpoint(), 10.0, ""});
  std::vector<Exchange> log;
  remote.set_recorder([&](const Exchange& e) { log.push_back(e); });
  OracleSlowPlanner oracle(g.spec);
  const FrontierChoice a = remote.plan(req);
  const FrontierChoice b = oracle.plan(req);
  CHECK(a.selected_index == b.selected_index);
  CHECK(a.selected_label == b.selected_label);
  REQUIRE(log.size() == 2);
  CHECK(log[0].stage == 1);
  CHECK(log[1].stage == 2);
  CHECK(remote.last_summary().has_value());
  server.stop();
}

TEST_CASE("transport failures and timeouts") {
  const auto g = maze();
  const PlanRequest req = sample_request(g.spec);
  PlannerServer server([](const std::string&) { return HttpReply{500, "boom", 0}; });
  server.start();
  RemoteSlowPlanner remote(RemoteConfig{server.endpoint(), 10.0, ""});
  CHECK(kind_of([&] { remote.plan(req); }) == SlowErrorKind::Transport);
  server.stop();

  PlannerServer slow([](const std::string&) { return HttpReply{200, "{}", 1500}; });
  slow.start();
  RemoteSlowPlanner impatient(RemoteConfig{slow.endpoint(), 0.3, ""});
  CHECK(kind_of([&] { impatient.plan(req); }) == SlowErrorKind::Timeout);
  slow.stop();

  RemoteSlowPlanner nowhere(RemoteConfig{"127.0.0.1:1", 1.0, ""});
  CHECK(kind_of([&] { nowhere.plan(req); }) == SlowErrorKind::Transport);
}

TEST_CASE("fixtures round trip and serve in both modes") {
  Fixture f;
  f.mode = FixtureMode::Sequential;
  f.description = "two replies";
  f.exchanges = {{"", 1, 200, "one", 0}, {"", 2, 200, "two", 0}};
  f.choices = {{1, "F2", "why"}};
  const auto path = std::filesystem::temp_directory_path() / "dualnav_fixture_test.json";
  save_fixture(f, path);
  const Fixture g = load_fixture(path);
  std::filesystem::remove(path);
  CHECK(g.mode == FixtureMode::Sequential);
  CHECK(g.choices == f.choices);
  REQUIRE(g.exchanges.size() == 2);
  FixtureService seq(g);
  CHECK(seq.handle("x").body == "one");
  CHECK(seq.handle("y").body == "two");
  CHECK(seq.handle("z").body == "two");
  CHECK(seq.served() == 3);

  Fixture strict;
  strict.exchanges = {{wire::hash_hex("req"), 1, 200, "ok", 0}};
  FixtureService st(strict);
  CHECK(st.handle("req").body == "ok");
  CHECK(st.handle("other").status == 404);
}

}
