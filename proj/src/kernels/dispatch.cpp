#include <atomic>

#include "kf/kernels.hpp"

namespace kf::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(KF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() noexcept {
  static const Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out) {
#if defined(KF_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::series_product(table, a, b, out);
#endif
  scalar::series_product(table, a, b, out);
}

void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n) {
#if defined(KF_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::matmul(a, b, c, m, k, n);
#endif
  scalar::matmul(a, b, c, m, k, n);
}

}  // namespace kf::kernels
