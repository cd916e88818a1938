// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher
// after the CPU has reported both features.

#include <immintrin.h>

#include "kf/kernels.hpp"

namespace kf::kernels::avx2 {
namespace {

// Two packed complex doubles [re0, im0, re1, im1].
inline __m256d load_pair(const cplx* lo, const cplx* hi) {
  return _mm256_set_m128d(_mm_loadu_pd(reinterpret_cast<const double*>(hi)),
                          _mm_loadu_pd(reinterpret_cast<const double*>(lo)));
}

inline __m256d cmul(__m256d x, __m256d y) {
  const __m256d y_re = _mm256_movedup_pd(y);
  const __m256d y_im = _mm256_permute_pd(y, 0xF);
  const __m256d x_sw = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, y_re, _mm256_mul_pd(x_sw, y_im));
}

inline cplx hsum(__m256d v) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

}  // namespace

void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out) {
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint32_t p = table.offsets[k];
    const std::uint32_t end = table.offsets[k + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; p + 1 < end; p += 2) {
      const __m256d x = load_pair(pa + table.lhs[p], pa + table.lhs[p + 1]);
      const __m256d y = load_pair(pb + table.rhs[p], pb + table.rhs[p + 1]);
      acc = _mm256_add_pd(acc, cmul(x, y));
    }
    cplx sum = hsum(acc);
    if (p < end) {
      const cplx x = pa[table.lhs[p]];
      const cplx y = pb[table.rhs[p]];
      sum += cplx{x.real() * y.real() - x.imag() * y.imag(),
                  x.real() * y.imag() + x.imag() * y.real()};
    }
    out[k] = sum;
  }
}

void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n) {
  const std::size_t pairs = n / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double* row = reinterpret_cast<double*>(c.data() + i * n);
    for (std::size_t j = 0; j < 2 * n; ++j) row[j] = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx s = a[i * k + l];
      const __m256d s_re = _mm256_set1_pd(s.real());
      const __m256d s_im = _mm256_set1_pd(s.imag());
      const double* brow = reinterpret_cast<const double*>(b.data() + l * n);
      for (std::size_t j = 0; j < pairs; ++j) {
        const __m256d x = _mm256_loadu_pd(brow + 4 * j);
        const __m256d x_sw = _mm256_permute_pd(x, 0x5);
        const __m256d prod = _mm256_fmaddsub_pd(x, s_re, _mm256_mul_pd(x_sw, s_im));
        _mm256_storeu_pd(row + 4 * j, _mm256_add_pd(_mm256_loadu_pd(row + 4 * j), prod));
      }
      if (n % 2 != 0) {
        const std::size_t j = n - 1;
        const double xr = brow[2 * j];
        const double xi = brow[2 * j + 1];
        row[2 * j] += xr * s.real() - xi * s.imag();
        row[2 * j + 1] += xi * s.real() + xr * s.imag();
      }
    }
  }
}

}  // namespace kf::kernels::avx2
