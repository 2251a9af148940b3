#include "dualnav/views.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "dualnav/kernels.hpp"
#include "dualnav/render.hpp"

namespace dualnav {

RenderedView render_view(const OccupancyMap& map, const Pose& pose, int patch_size) {
  RenderedView view;
  view.pose = pose;
  view.patch_size = patch_size;
  view.patch.assign(static_cast<std::size_t>(patch_size * patch_size), 0);
  const GridFrame& f = map.frame();
  const Point dir = heading_vector(pose.heading_deg);
  const double half = (patch_size - 1) / 2.0;
  for (int r = 0; r < patch_size; ++r) {
    const double left = (half - r) * f.resolution;
    for (int c = 0; c < patch_size; ++c) {
      const double fwd = (c - half) * f.resolution;
      const Point p{pose.x + fwd * dir.x - left * dir.y, pose.y + fwd * dir.y + left * dir.x};
      const auto cell = f.cell_at(p);
      view.patch[static_cast<std::size_t>(r * patch_size + c)] =
          cell ? static_cast<std::uint8_t>(map.at(*cell)) : 0;
    }
  }
  return view;
}

std::vector<RenderedView> render_views(const OccupancyMap& map, const std::vector<Point>& path,
                                       int current_heading, const ViewConfig& cfg) {
  std::vector<RenderedView> views;
  views.reserve(path.size());
  int heading = normalize_heading(current_heading);
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (j + 1 < path.size()) {
      const double dx = path[j + 1].x - path[j].x;
      const double dy = path[j + 1].y - path[j].y;
      if (dx != 0.0 || dy != 0.0) heading = snap_heading(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
    }
    views.push_back(render_view(map, Pose{path[j].x, path[j].y, heading}, cfg.patch_size));
  }
  return views;
}

Embedding OccupancyEmbedder::embed(const RenderedView& view) const {
  Embedding e;
  e.vector.resize(view.patch.size());
  kernels::active().occupancy_to_signed(view.patch.data(), e.vector.data(), view.patch.size());
  const double norm2 = kernels::squared_norm(e.vector);
  if (norm2 == 0.0) {
    std::fill(e.vector.begin(), e.vector.end(), 0.0);
    if (!e.vector.empty()) e.vector[0] = 1.0;
    return e;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : e.vector) v *= inv;
  return e;
}

Embedding embed(const RenderedView& view) { return OccupancyEmbedder{}.embed(view); }

Embedding make_embedding(std::vector<double> raw) {
  if (raw.empty()) throw Error("embedding must be non-empty");
  const double norm2 = kernels::squared_norm(raw);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw Error("embedding must have finite non-zero norm");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : raw) v *= inv;
  return Embedding{std::move(raw)};
}

double similarity(const Embedding& a, const Embedding& b) noexcept {
  return kernels::cosine(a.vector, b.vector);
}

std::vector<int> prune(std::span<const Embedding> embeddings, double tau, PruneMode mode) {
  if (embeddings.empty()) throw Error("prune needs at least one view");
  std::vector<int> kept{0};
  std::size_t reference = 0;
  for (std::size_t k = 0; k + 1 < embeddings.size(); ++k) {
    if (mode == PruneMode::Consecutive) reference = k;
    if (similarity(embeddings[reference], embeddings[k + 1]) < tau) {
      kept.push_back(static_cast<int>(k + 1));
      reference = k + 1;
    }
  }
  return kept;
}

std::vector<int> prune(std::span<const RenderedView> views, std::span<const Embedding> embeddings,
                       double tau, PruneMode mode) {
  if (views.size() != embeddings.size()) {
    throw Error(fmt::format("prune: {} views but {} embeddings", views.size(), embeddings.size()));
  }
  return prune(embeddings, tau, mode);
}

void export_view_sequence(const std::filesystem::path& dir, std::span<const RenderedView> views,
                          std::span<const int> kept) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  std::size_t next_kept = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const bool is_kept = next_kept < kept.size() && kept[next_kept] == static_cast<int>(i);
    if (is_kept) ++next_kept;
    const std::string name = fmt::format("view_{:03d}.ppm", i);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << patch_to_ppm(views[i]);
    manifest.push_back({{"index", i},
                        {"file", name},
                        {"x", views[i].pose.x},
                        {"y", views[i].pose.y},
                        {"heading", views[i].pose.heading_deg},
                        {"kept", is_kept}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
}

}  // namespace dualnav
