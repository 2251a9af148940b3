#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualnav/mapping.hpp"
#include "dualnav/views.hpp"

namespace dualnav {

// Binary P6 image; rgb holds width * height * 3 bytes, top row first.
std::string encode_ppm(int width, int height, const std::vector<std::uint8_t>& rgb);

// Decodes a P6 image produced by encode_ppm. Throws Error on malformed data.
struct PpmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};
PpmImage decode_ppm(const std::string& bytes);

// One pixel per patch cell.
std::string patch_to_ppm(const RenderedView& view);

// Top-down belief map with +y up, `scale` pixels per cell, frontier cells
// highlighted.
std::string map_to_ppm(const OccupancyMap& map, const std::vector<Frontier>& frontiers, int scale = 4);

struct SvgScene {
  OccupancyMap map;
  std::vector<Point> frontiers;
  std::vector<std::vector<Point>> plans;
  std::vector<Point> trajectory;
  Point goal;
  double goal_radius = 3.0;
  bool show_goal = true;
  int cell_px = 8;
};

// Deterministic SVG (fixed formatting, no timestamps). The trajectory is a
// single <path id="trajectory"> with one coordinate pair per position.
std::string render_svg(const SvgScene& scene);

std::string map_to_svg(const OccupancyMap& map, const std::vector<Frontier>& frontiers, int cell_px = 8);

}  // namespace dualnav
