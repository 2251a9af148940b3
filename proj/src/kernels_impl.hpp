#pragma once

#include "dualnav/kernels.hpp"

namespace dualnav::kernels {

#if defined(DUALNAV_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept;
void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(DUALNAV_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) noexcept;
void occupancy_to_signed(const std::uint8_t* states, double* out,
                         std::size_t n) noexcept;
}  // namespace neon
#endif

}  // namespace dualnav::kernels
