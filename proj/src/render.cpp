#include "dualnav/render.hpp"

#include <fmt/format.h>

namespace dualnav {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kUnknown{158, 158, 158};
constexpr Rgb kFree{255, 255, 255};
constexpr Rgb kOccupied{32, 32, 32};
constexpr Rgb kFrontier{30, 136, 229};

Rgb color_of(CellState s) noexcept {
  switch (s) {
    case CellState::Free: return kFree;
    case CellState::Occupied: return kOccupied;
    case CellState::Unknown: break;
  }
  return kUnknown;
}

std::string hex(Rgb c) { return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b); }

}  // namespace

std::string encode_ppm(int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw Error("ppm pixel buffer does not match its dimensions");
  }
  std::string out = fmt::format("P6\n{} {}\n255\n", width, height);
  out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
  return out;
}

PpmImage decode_ppm(const std::string& bytes) {
  PpmImage img;
  int maxval = 0;
  int consumed = 0;
  if (std::sscanf(bytes.c_str(), "P6 %d %d %d%n", &img.width, &img.height, &maxval, &consumed) != 3 ||
      maxval != 255 || img.width < 0 || img.height < 0) {
    throw Error("not a P6 image");
  }
  const std::size_t offset = static_cast<std::size_t>(consumed) + 1;
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3;
  if (bytes.size() < offset + n) throw Error("P6 image truncated");
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                 bytes.begin() + static_cast<std::ptrdiff_t>(offset + n));
  return img;
}

std::string patch_to_ppm(const RenderedView& view) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(view.patch.size() * 3);
  for (auto s : view.patch) {
    const Rgb c = color_of(static_cast<CellState>(s));
    rgb.insert(rgb.end(), {c.r, c.g, c.b});
  }
  return encode_ppm(view.patch_size, view.patch_size, rgb);
}

std::string map_to_ppm(const OccupancyMap& map, const std::vector<Frontier>& frontiers, int scale) {
  const GridFrame& f = map.frame();
  std::vector<Rgb> cell_color(static_cast<std::size_t>(f.cell_count()));
  for (int i = 0; i < f.cell_count(); ++i) cell_color[static_cast<std::size_t>(i)] = color_of(map.at(i));
  for (const auto& fr : frontiers) {
    for (int c : fr.cells) cell_color[static_cast<std::size_t>(c)] = kFrontier;
  }
  const int w = f.width * scale;
  const int h = f.height * scale;
  std::vector<std::uint8_t> rgb;
  rgb.reserve(static_cast<std::size_t>(w * h * 3));
  for (int y = 0; y < h; ++y) {
    const int row = f.height - 1 - y / scale;
    for (int x = 0; x < w; ++x) {
      const Rgb c = cell_color[static_cast<std::size_t>(f.index(x / scale, row))];
      rgb.insert(rgb.end(), {c.r, c.g, c.b});
    }
  }
  return encode_ppm(w, h, rgb);
}

namespace {

struct Projector {
  const GridFrame& f;
  int px;
  double x(double mx) const { return (mx / f.resolution + 0.5) * px; }
  double y(double my) const { return (f.height - 0.5 - my / f.resolution) * px; }
};

void append_cells(std::string& out, const OccupancyMap& map, int px) {
  const GridFrame& f = map.frame();
  for (int row = 0; row < f.height; ++row) {
    const int y = (f.height - 1 - row) * px;
    int col = 0;
    while (col < f.width) {
      const CellState s = map.at(col, row);
      int end = col + 1;
      while (end < f.width && map.at(end, row) == s) ++end;
      out += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>)", col * px, y,
                         (end - col) * px, px, hex(color_of(s)));
      out += '\n';
      col = end;
    }
  }
}

std::string polyline(const Projector& pj, const std::vector<Point>& pts) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "M" : " L", pj.x(pts[i].x), pj.y(pts[i].y));
  }
  return d;
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  const GridFrame& f = scene.map.frame();
  const int px = scene.cell_px;
  const Projector pj{f, px};
  std::string out = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)",
      f.width * px, f.height * px, f.width * px, f.height * px);
  out += "\n<g id=\"map\">\n";
  append_cells(out, scene.map, px);
  out += "</g>\n";
  if (scene.show_goal) {
    out += fmt::format(
      R"(<circle id="goal" cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="#43a047" fill-opacity="0.25" stroke="#2e7d32"/>)",
      pj.x(scene.goal.x), pj.y(scene.goal.y), scene.goal_radius / f.resolution * px);
    out += '\n';
  }
  out += "<g id=\"frontiers\">\n";
  for (const Point& p : scene.frontiers) {
    out += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="{}"/>)", pj.x(p.x), pj.y(p.y),
                       px * 0.4, hex(kFrontier));
    out += '\n';
  }
  out += "</g>\n<g id=\"plans\">\n";
  for (const auto& plan : scene.plans) {
    if (plan.empty()) continue;
    out += fmt::format(R"(<path d="{}" fill="none" stroke="#fb8c00" stroke-width="{:.2f}" stroke-dasharray="4 2"/>)",
                       polyline(pj, plan), px * 0.25);
    out += '\n';
  }
  out += "</g>\n";
  if (!scene.trajectory.empty()) {
    out += fmt::format(R"(<path id="trajectory" d="{}" fill="none" stroke="#e53935" stroke-width="{:.2f}"/>)",
                       polyline(pj, scene.trajectory), px * 0.3);
    out += '\n';
  }
  out += "</svg>\n";
  return out;
}

std::string map_to_svg(const OccupancyMap& map, const std::vector<Frontier>& frontiers, int cell_px) {
  SvgScene scene;
  scene.map = map;
  for (const auto& fr : frontiers) scene.frontiers.push_back(fr.representative);
  scene.show_goal = false;
  scene.cell_px = cell_px;
  return render_svg(scene);
}

}  // namespace dualnav
