// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace dualnav::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double squared_norm(const double* a, std::size_t n) noexcept { return dot(a, a, n); }

void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(xs + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(ys + j));
    // Separate mul/add (no FMA) keeps results identical to the scalar path.
    const __m256d sum = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(sum));
  }
  for (; j < n; ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    out[j] = std::sqrt(dx2 + dy2);
  }
}

void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  const __m256d free_v = _mm256_set1_pd(1.0);
  const __m256d occ_v = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    int word;
    std::memcpy(&word, states + i, sizeof(word));
    const __m128i bytes = _mm_cvtsi32_si128(word);
    const __m256d s = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(bytes));
    const __m256d is_free = _mm256_cmp_pd(s, free_v, _CMP_EQ_OQ);
    const __m256d is_occ = _mm256_cmp_pd(s, occ_v, _CMP_EQ_OQ);
    const __m256d v = _mm256_or_pd(_mm256_and_pd(is_free, one),
                                   _mm256_and_pd(is_occ, minus_one));
    _mm256_storeu_pd(out + i, v);
  }
  scalar::occupancy_to_signed(states + i, out + i, n - i);
}

}  // namespace dualnav::kernels::avx2
