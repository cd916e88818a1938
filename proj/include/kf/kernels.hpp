#ifndef KF_KERNELS_HPP
#define KF_KERNELS_HPP

// Data-parallel inner loops shared by the jet algebra and the tensor
// contractions. Every kernel has a portable scalar reference and, when the
// build enables it, an AVX2/FMA variant. The variant is chosen once at
// runtime from the CPU feature bits; set_isa() pins a specific one (tests
// use it to compare variants on identical inputs).

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

namespace kf::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

// Best variant supported by both the build and the running CPU.
Isa detected_isa() noexcept;

// Variant currently used by the dispatching entry points below.
Isa active_isa() noexcept;

// Pins the dispatch target. Requesting an unavailable variant falls back to
// scalar; the return value is the variant actually installed.
Isa set_isa(Isa isa) noexcept;

// Truncated-series product in CSR form grouped by output coefficient:
//   out[k] = sum_{p in [offsets[k], offsets[k+1])} a[lhs[p]] * b[rhs[p]]
// offsets has out.size() + 1 entries.
struct ProductTable {
  std::span<const std::uint32_t> offsets;
  std::span<const std::uint32_t> lhs;
  std::span<const std::uint32_t> rhs;
};

void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out);

// Row-major complex matrix product c(m x n) = a(m x k) * b(k x n).
void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n);

namespace scalar {
void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out);
void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n);
}  // namespace scalar

#if defined(KF_HAVE_AVX2)
namespace avx2 {
void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out);
void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n);
}  // namespace avx2
#endif

}  // namespace kf::kernels

#endif  // KF_KERNELS_HPP
