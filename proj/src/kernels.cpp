#include "dualnav/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace dualnav::kernels {

namespace {

constexpr KernelTable kScalar{&scalar::dot, &scalar::squared_norm,
                              &scalar::distance_row, &scalar::occupancy_to_signed};

#if defined(DUALNAV_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::dot, &avx2::squared_norm, &avx2::distance_row,
                            &avx2::occupancy_to_signed};
#endif

#if defined(DUALNAV_HAVE_NEON)
constexpr KernelTable kNeon{&neon::dot, &neon::squared_norm, &neon::distance_row,
                            &neon::occupancy_to_signed};
#endif

bool force_scalar() noexcept {
  const char* env = std::getenv("DUALNAV_FORCE_SCALAR");
  return env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0';
}

Isa detect() noexcept {
  if (force_scalar()) return Isa::Scalar;
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    case Isa::Scalar: break;
  }
  return "scalar";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(DUALNAV_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(DUALNAV_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& table(Isa isa) noexcept {
  switch (isa) {
#if defined(DUALNAV_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(DUALNAV_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() noexcept {
  static const KernelTable& t = table(active_isa());
  return t;
}

double cosine(std::span<const double> a, std::span<const double> b) noexcept {
  const auto& k = active();
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const double na = k.squared_norm(a.data(), n);
  const double nb = k.squared_norm(b.data(), n);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return k.dot(a.data(), b.data(), n) / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace dualnav::kernels
