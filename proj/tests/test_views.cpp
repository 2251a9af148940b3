#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "dualnav/views.hpp"
#include "support.hpp"

using namespace dualnav;

namespace {

std::vector<Embedding> random_sequence(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  // A random walk in feature space gives a realistic mix of similar and
  // dissimilar neighbours.
  std::normal_distribution<double> g(0.0, 0.35);
  std::vector<double> cur(dim);
  for (auto& v : cur) v = g(rng) + 1.0;
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : cur) v += g(rng);
    out.push_back(make_embedding(cur));
  }
  return out;
}

}  // namespace

TEST_SUITE("views") {

TEST_CASE("rendered patch is aligned with the heading") {
  const auto g = testsupport::grid({
      "#######",
      "#.....#",
      "#.....#",
      "#.....#",
      "#######",
  });
  OccupancyMap m(g.frame(), g.cells());
  const RenderedView v = render_view(m, Pose{0.75, 0.5, 0}, 3);
  // Centre pixel is the agent's cell, column 2 is one cell ahead.
  CHECK(v.patch[4] == static_cast<std::uint8_t>(CellState::Free));
  const RenderedView up = render_view(m, Pose{0.75, 0.75, 90}, 3);
  // Facing +y, one cell ahead is row 4 (the wall).
  CHECK(up.patch[1 * 3 + 2] == static_cast<std::uint8_t>(CellState::Occupied));
  // Cells outside the grid render as unknown.
  const RenderedView edge = render_view(m, Pose{0.0, 0.0, 180}, 3);
  CHECK(edge.patch[1 * 3 + 2] == 0);
}

TEST_CASE("views face the next path point") {
  OccupancyMap m(GridFrame{10, 10, 0.25});
  const std::vector<Point> path{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}};
  const auto views = render_views(m, path, 180, {});
  REQUIRE(views.size() == 3);
  CHECK(views[0].pose.heading_deg == 0);
  CHECK(views[1].pose.heading_deg == 90);
  CHECK(views[2].pose.heading_deg == 90);
  CHECK(render_views(m, {{0.25, 0.25}}, 195, {})[0].pose.heading_deg == 195);
}

TEST_CASE("occupancy embedding") {
  RenderedView v;
  v.patch_size = 2;
  v.patch = {0, 1, 2, 1};
  const Embedding e = embed(v);
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(e.vector[0] == 0.0);
  CHECK(e.vector[1] == doctest::Approx(s));
  CHECK(e.vector[2] == doctest::Approx(-s));
  v.patch = {0, 0, 0, 0};
  CHECK(embed(v).vector == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(make_embedding({0.0, 0.0}), Error);
  CHECK_THROWS_AS(make_embedding({}), Error);
}

TEST_CASE("prune keeps the first view and drops near duplicates") {
  const std::vector<Embedding> e{make_embedding({1, 0}), make_embedding({1, 0.01}), make_embedding({0, 1}),
                                 make_embedding({0.01, 1})};
  CHECK(prune(e, 0.92) == std::vector<int>{0, 2});
  CHECK(prune(e, 1.5) == std::vector<int>{0, 1, 2, 3});
  CHECK(prune(e, -2.0) == std::vector<int>{0});
  CHECK(prune(std::span<const Embedding>(e.data(), 1), 0.5) == std::vector<int>{0});
  CHECK_THROWS_AS(prune(std::span<const Embedding>(), 0.5), Error);
  const std::vector<RenderedView> views(3);
  CHECK_THROWS_AS(prune(views, e, 0.5), Error);
}

TEST_CASE("last-kept and consecutive modes differ on slow drift") {
  // Each step turns 10 degrees: consecutive similarity stays high, but the
  // drift from the last kept view accumulates.
  std::vector<Embedding> e;
  for (int i = 0; i < 10; ++i) {
    const double a = i * 10.0 * M_PI / 180.0;
    e.push_back(make_embedding({std::cos(a), std::sin(a)}));
  }
  CHECK(prune(e, 0.95, PruneMode::Consecutive) == std::vector<int>{0});
  CHECK(prune(e, 0.95, PruneMode::LastKept).size() > 1);
}

TEST_CASE("property: prune matches the reference scan") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = random_sequence(rng, 1 + rng() % 30, 8);
    std::vector<std::vector<double>> raw;
    for (const auto& e : seq) raw.push_back(e.vector);
    for (double tau : {0.5, 0.9, 0.92, 0.99}) {
      const auto kept = prune(seq, tau, PruneMode::LastKept);
      CHECK(kept == testsupport::prune_oracle(raw, tau, false));
      CHECK(prune(seq, tau, PruneMode::Consecutive) == testsupport::prune_oracle(raw, tau, true));
      // Every dropped view is similar to the most recent kept one.
      std::size_t next = 0;
      int last = 0;
      for (int k = 0; k < static_cast<int>(seq.size()); ++k) {
        if (next < kept.size() && kept[next] == k) {
          last = k;
          ++next;
        } else {
          CHECK(similarity(seq[static_cast<std::size_t>(last)], seq[static_cast<std::size_t>(k)]) >= tau);
        }
      }
    }
  }
}

TEST_CASE("view export writes images and a manifest") {
  OccupancyMap m(GridFrame{8, 8, 0.25});
  const auto views = render_views(m, {{0.5, 0.5}, {1.0, 0.5}}, 0, {});
  const std::vector<int> kept{0};
  const auto dir = std::filesystem::temp_directory_path() / "dualnav_views_test";
  std::filesystem::remove_all(dir);
  export_view_sequence(dir, views, kept);
  CHECK(std::filesystem::exists(dir / "view_000.ppm"));
  CHECK(std::filesystem::exists(dir / "view_001.ppm"));
  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["kept"] == true);
  CHECK(j[1]["kept"] == false);
  std::filesystem::remove_all(dir);
}

}
