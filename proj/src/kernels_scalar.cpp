#include "dualnav/kernels.hpp"

#include <cmath>

namespace dualnav::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double squared_norm(const double* a, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * a[i];
  }
  return acc;
}

void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    out[j] = std::sqrt(dx2 + dy2);
  }
}

void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    switch (states[i]) {
      case 1: out[i] = 1.0; break;
      case 2: out[i] = -1.0; break;
      default: out[i] = 0.0; break;
    }
  }
}

}  // namespace dualnav::kernels::scalar
