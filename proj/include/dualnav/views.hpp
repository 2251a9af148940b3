#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dualnav/mapping.hpp"
#include "dualnav/planner.hpp"

namespace dualnav {

enum class PruneMode { LastKept, Consecutive };

struct ViewConfig {
  int patch_size = 16;  // W, patch is W x W cells
  double tau = 0.92;
  PruneMode prune_mode = PruneMode::LastKept;
};

// Local occupancy window standing in for a camera image. patch[r * W + c]
// holds the state (0 unknown, 1 free, 2 occupied) at forward offset
// c - (W-1)/2 and leftward offset (W-1)/2 - r cells in the heading frame.
struct RenderedView {
  Pose pose;
  int patch_size = 0;
  std::vector<std::uint8_t> patch;
};

struct Embedding {
  std::vector<double> vector;  // unit norm
};

// One view per path point; point j faces point j + 1 (snapped to 15 degrees),
// the last point keeps the previous heading and a single-point path uses
// `current_heading`.
std::vector<RenderedView> render_views(const OccupancyMap& map, const std::vector<Point>& path,
                                       int current_heading, const ViewConfig& cfg = {});

RenderedView render_view(const OccupancyMap& map, const Pose& pose, int patch_size);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(const RenderedView& view) const = 0;
};

// Default embedder: states -> {0 unknown, +1 free, -1 occupied}, L2
// normalized; an all-unknown patch maps to e1.
class OccupancyEmbedder final : public Embedder {
 public:
  Embedding embed(const RenderedView& view) const override;
};

Embedding embed(const RenderedView& view);

// Normalizes an externally produced feature vector. Throws Error on an empty
// or zero vector.
Embedding make_embedding(std::vector<double> raw);

double similarity(const Embedding& a, const Embedding& b) noexcept;

// Kept view indices. Index 0 is always kept; view k+1 is kept iff its
// similarity to the reference view is < tau, where the reference is the most
// recently kept view (LastKept) or view k (Consecutive).
std::vector<int> prune(std::span<const Embedding> embeddings, double tau,
                       PruneMode mode = PruneMode::LastKept);
std::vector<int> prune(std::span<const RenderedView> views, std::span<const Embedding> embeddings,
                       double tau, PruneMode mode = PruneMode::LastKept);

// Writes view_000.ppm ... and manifest.json ({index, x, y, heading, kept}).
void export_view_sequence(const std::filesystem::path& dir, std::span<const RenderedView> views,
                          std::span<const int> kept);

}  // namespace dualnav
