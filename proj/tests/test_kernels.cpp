#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "dualnav/kernels.hpp"

using namespace dualnav::kernels;

namespace {

std::vector<Isa> simd_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available") {
  CHECK(isa_available(Isa::Scalar));
  CHECK(table(Isa::Scalar).dot == &scalar::dot);
  MESSAGE("active isa: " << isa_name(active_isa()));
}

TEST_CASE("distance_row and occupancy_to_signed are bit-identical across variants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> state(0, 2);
  for (Isa isa : simd_isas()) {
    const KernelTable& simd = table(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 257u}) {
      std::vector<double> xs(n), ys(n), a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = u(rng);
        ys[i] = u(rng);
      }
      const double px = u(rng), py = u(rng);
      scalar::distance_row(px, py, xs.data(), ys.data(), a.data(), n);
      simd.distance_row(px, py, xs.data(), ys.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(a[i], b[i]));

      std::vector<std::uint8_t> st(n + 1);
      for (auto& s : st) s = static_cast<std::uint8_t>(state(rng));
      // Offset by one byte so the SIMD loads are unaligned.
      scalar::occupancy_to_signed(st.data() + 1, a.data(), n);
      simd.occupancy_to_signed(st.data() + 1, b.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(a[i], b[i]));
    }
  }
}

TEST_CASE("dot and squared_norm agree with the scalar reference") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (Isa isa : simd_isas()) {
    const KernelTable& simd = table(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 9u, 16u, 33u, 256u, 1000u}) {
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = g(rng);
        b[i] = g(rng);
      }
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      // Summation order differs, so allow a few ulps of the absolute sum.
      CHECK(std::abs(simd.dot(a.data(), b.data(), n) - scalar::dot(a.data(), b.data(), n)) <= 1e-13 * (mag + 1.0));
      const double sn = scalar::squared_norm(a.data(), n);
      CHECK(std::abs(simd.squared_norm(a.data(), n) - sn) <= 1e-13 * (sn + 1.0));
    }
  }
}

TEST_CASE("scalar kernels match direct arithmetic") {
  const double a[] = {1.0, -2.0, 3.0};
  const double b[] = {4.0, 5.0, -6.0};
  CHECK(scalar::dot(a, b, 3) == doctest::Approx(4.0 - 10.0 - 18.0));
  CHECK(scalar::squared_norm(a, 3) == doctest::Approx(14.0));
  const std::uint8_t s[] = {0, 1, 2, 1};
  double out[4];
  scalar::occupancy_to_signed(s, out, 4);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);
  CHECK(out[2] == -1.0);
  CHECK(out[3] == 1.0);
  const double xs[] = {3.0}, ys[] = {4.0};
  double d[1];
  scalar::distance_row(0.0, 0.0, xs, ys, d, 1);
  CHECK(d[0] == 5.0);
}

TEST_CASE("cosine handles zero vectors") {
  const std::vector<double> z(4, 0.0), v{1.0, 0.0, 0.0, 0.0};
  CHECK(cosine(z, v) == 0.0);
  CHECK(cosine(v, v) == doctest::Approx(1.0));
}

}
