#pragma once

#include <cstdint>
#include <vector>

#include "dualnav/world.hpp"

namespace dualnav {

struct GenSpec {
  std::uint64_t seed = 0;
  int size = 41;             // cells per side
  int room_count = 0;
  int corridor_width = 1;    // cells
  int junction_target = 4;
  double min_geodesic = 10.0;  // meters
  double min_separation = 6.0;  // straight-line start-goal distance, meters
  // max_steps = min(500, ceil(factor * geodesic length in cells))
  double step_budget_factor = 4.0;
  double resolution = 0.25;
  int min_spur = 3;          // dead-end branch length range, lattice steps
  int max_spur = 8;
  int max_attempts = 200;
};

struct GeneratedScenario {
  EpisodeSpec spec;
  std::vector<Point> reference_path;  // ground-truth geodesic, cell centers
  double geodesic_m = 0.0;
  int junctions = 0;
};

class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

// Free cells with at least three free 4-neighbours, grouped into 8-connected
// clusters; a room counts once.
int count_junctions(const GroundTruthGrid& grid);
bool is_junction_cell(const GroundTruthGrid& grid, int index) noexcept;

// Tree-shaped corridor maze: a main corridor from start to goal, dead-end
// branches hung off it (one junction each) and optional rooms carved along
// the main corridor. Deterministic in GenSpec.
GeneratedScenario generate(const GenSpec& spec);

}  // namespace dualnav
