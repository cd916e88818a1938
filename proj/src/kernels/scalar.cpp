#include "kf/kernels.hpp"

namespace kf::kernels::scalar {

void series_product(const ProductTable& table, std::span<const cplx> a,
                    std::span<const cplx> b, std::span<cplx> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::uint32_t p = table.offsets[k]; p < table.offsets[k + 1]; ++p) {
      const cplx x = a[table.lhs[p]];
      const cplx y = b[table.rhs[p]];
      re += x.real() * y.real() - x.imag() * y.imag();
      im += x.real() * y.imag() + x.imag() * y.real();
    }
    out[k] = {re, im};
  }
}

void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
            std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* row = c.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx s = a[i * k + l];
      const cplx* brow = b.data() + l * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
}

}  // namespace kf::kernels::scalar
