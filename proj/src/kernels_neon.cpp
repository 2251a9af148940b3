#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace dualnav::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double squared_norm(const double* a, std::size_t n) noexcept { return dot(a, a, n); }

void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept {
  const float64x2_t vx = vdupq_n_f64(px);
  const float64x2_t vy = vdupq_n_f64(py);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vx, vld1q_f64(xs + j));
    const float64x2_t dy = vsubq_f64(vy, vld1q_f64(ys + j));
    const float64x2_t sum = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(out + j, vsqrtq_f64(sum));
  }
  scalar::distance_row(px, py, xs + j, ys + j, out + j, n - j);
}

void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept {
  scalar::occupancy_to_signed(states, out, n);
}

}  // namespace dualnav::kernels::neon
