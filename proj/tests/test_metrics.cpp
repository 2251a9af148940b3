#include <doctest.h>

#include <random>
#include <sstream>

#include "dualnav/metrics.hpp"
#include "support.hpp"

using namespace dualnav;

namespace {

// 40 x 3 corridor, 10 m long.
EpisodeSpec corridor_spec() {
  std::vector<std::string> rows{std::string(42, '#'), "#" + std::string(40, '.') + "#", std::string(42, '#')};
  EpisodeSpec s;
  s.grid = testsupport::grid(rows);
  s.start = Pose{0.25, 0.25, 0};
  s.goal = Point{10.0, 0.25};
  s.max_steps = 500;
  return s;
}

EpisodeResult result_along(std::vector<Point> path, bool success) {
  EpisodeResult r;
  r.path = std::move(path);
  r.step_count = static_cast<int>(r.path.size()) - 1;
  r.final_pose = Pose{r.path.back().x, r.path.back().y, 0};
  r.success = success;
  r.stopped = success;
  return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("following the reference exactly") {
  const EpisodeSpec spec = corridor_spec();
  const auto ref = reference_path(spec);
  REQUIRE(ref.size() == 40);
  CHECK(geodesic_path(spec).cost == doctest::Approx(9.75));
  const EpisodeRecord rec = episode_metrics(result_along(ref, true), spec);
  CHECK(rec.ne_m == 0.0);
  CHECK(rec.success == 1.0);
  CHECK(rec.oracle_success == 1.0);
  CHECK(rec.spl == doctest::Approx(1.0));
  CHECK(rec.ndtw == 1.0);
}

TEST_CASE("oracle success without success") {
  const EpisodeSpec spec = corridor_spec();
  auto ref = reference_path(spec);
  // Walk to the goal and back to x = 5.
  for (int c = 38; c >= 20; --c) ref.push_back(Point{c * 0.25, 0.25});
  const EpisodeRecord rec = episode_metrics(result_along(ref, false), spec);
  CHECK(rec.success == 0.0);
  CHECK(rec.oracle_success == 1.0);
  CHECK(rec.spl == 0.0);
  CHECK(rec.ne_m == doctest::Approx(5.0));
  CHECK(rec.ndtw < 1.0);
}

TEST_CASE("a detour lowers SPL in proportion to length") {
  const EpisodeSpec spec = corridor_spec();
  std::vector<Point> path;
  for (int c = 1; c <= 40; ++c) path.push_back(Point{c * 0.25, 0.25});
  for (int c = 39; c >= 1; --c) path.push_back(Point{c * 0.25, 0.25});
  for (int c = 2; c <= 40; ++c) path.push_back(Point{c * 0.25, 0.25});
  const EpisodeRecord rec = episode_metrics(result_along(path, true), spec);
  CHECK(rec.spl == doctest::Approx(9.75 / (3 * 9.75)));
}

TEST_CASE("property: DTW matches the full table and nDTW is bounded") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> q(1 + rng() % 20), r(1 + rng() % 20);
    for (auto& p : q) p = Point{u(rng), u(rng)};
    for (auto& p : r) p = Point{u(rng), u(rng)};
    const double d = dtw_distance(q, r);
    CHECK(std::abs(d - testsupport::dtw_oracle(q, r)) < 1e-9);
    CHECK(dtw_distance(q, q) == 0.0);
    const double n = ndtw(q, r, 3.0);
    CHECK(n > 0.0);
    CHECK(n <= 1.0);
    CHECK(ndtw(r, r, 3.0) == 1.0);
  }
}

TEST_CASE("nDTW falls as the path is shifted away from the reference") {
  std::vector<Point> ref;
  for (int i = 0; i < 20; ++i) ref.push_back(Point{i * 0.25, 0.0});
  double prev = 1.0;
  for (double off : {0.25, 0.5, 1.0, 2.0}) {
    std::vector<Point> q = ref;
    for (auto& p : q) p.y += off;
    const double n = ndtw(q, ref, 3.0);
    CHECK(n < prev);
    CHECK(n == doctest::Approx(std::exp(-off / 3.0)));
    prev = n;
  }
}

TEST_CASE("aggregate is the arithmetic mean") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EpisodeRecord> recs(37);
  double ne = 0, sr = 0, os = 0, spl = 0, nd = 0;
  for (auto& e : recs) {
    e.ne_m = 10 * u(rng);
    e.success = u(rng) < 0.5;
    e.oracle_success = e.success > 0 || u(rng) < 0.3;
    e.spl = e.success * u(rng);
    e.ndtw = u(rng);
    ne += e.ne_m;
    sr += e.success;
    os += e.oracle_success;
    spl += e.spl;
    nd += e.ndtw;
  }
  const MetricsReport r = aggregate(recs);
  CHECK(r.n_episodes == 37);
  CHECK(r.ne_m == doctest::Approx(ne / 37));
  CHECK(r.sr == doctest::Approx(sr / 37));
  CHECK(r.os == doctest::Approx(os / 37));
  CHECK(r.spl == doctest::Approx(spl / 37));
  CHECK(r.ndtw == doctest::Approx(nd / 37));
  CHECK(r.os >= r.sr);
  CHECK_THROWS_AS(aggregate(std::span<const EpisodeRecord>()), Error);
}

TEST_CASE("empty paths are rejected") {
  const EpisodeSpec spec = corridor_spec();
  EpisodeResult r;
  CHECK_THROWS_AS(episode_metrics(r, spec), Error);
}

TEST_CASE("metrics csv omits wall time unless asked") {
  std::vector<EpisodeRecord> recs(2);
  recs[0].scenario = "a";
  recs[0].at_s = 1.5;
  recs[1].scenario = "b";
  recs[1].seed = 3;
  std::ostringstream plain, timed;
  write_metrics_csv(plain, recs);
  write_metrics_csv(timed, recs, true);
  CHECK(plain.str().find("at_s") == std::string::npos);
  CHECK(timed.str().find("at_s") != std::string::npos);
  CHECK(plain.str().find("\nmean,,") != std::string::npos);
}

}
