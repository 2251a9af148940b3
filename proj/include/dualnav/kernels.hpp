#pragma once

// Data-parallel inner loops shared by the embedding, pruning, alignment-loss
// and trajectory-metric code. Every kernel has a scalar reference version;
// SIMD variants are selected once at runtime from what the CPU reports.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dualnav::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

// ISA used by the dispatching entry points below. Setting the environment
// variable DUALNAV_FORCE_SCALAR=1 before first use pins the scalar path.
Isa active_isa() noexcept;

// True when `isa` can run on this machine (scalar always can).
bool isa_available(Isa isa) noexcept;

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n) noexcept;
  double (*squared_norm)(const double* a, std::size_t n) noexcept;
  // out[j] = |(px, py) - (xs[j], ys[j])|, computed as sqrt(dx*dx + dy*dy)
  // without fused multiply-add so every variant is bit-identical.
  void (*distance_row)(double px, double py, const double* xs, const double* ys,
                       double* out, std::size_t n) noexcept;
  // Maps occupancy states {0 unknown, 1 free, 2 occupied} to {0, +1, -1}.
  void (*occupancy_to_signed)(const std::uint8_t* states, double* out,
                              std::size_t n) noexcept;
};

const KernelTable& table(Isa isa) noexcept;
const KernelTable& active() noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept;
void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept;
}  // namespace scalar

// Convenience wrappers over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double squared_norm(std::span<const double> a) noexcept {
  return active().squared_norm(a.data(), a.size());
}

// Cosine similarity; returns 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace dualnav::kernels
