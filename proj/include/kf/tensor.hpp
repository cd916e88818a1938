#ifndef KF_TENSOR_HPP
#define KF_TENSOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kf {

using cplx = std::complex<double>;

// Dense complex tensor of rank R with every extent equal to n, stored
// row-major (last index fastest).
template <int R>
class CubeTensor {
 public:
  CubeTensor() = default;
  explicit CubeTensor(int n) : n_(n), data_(count(n)) {}

  int extent() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  template <class... I>
    requires(sizeof...(I) == R)
  cplx& operator()(I... idx) noexcept {
    return data_[offset(idx...)];
  }
  template <class... I>
    requires(sizeof...(I) == R)
  const cplx& operator()(I... idx) const noexcept {
    return data_[offset(idx...)];
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  static std::size_t count(int n) {
    std::size_t c = 1;
    for (int r = 0; r < R; ++r) c *= static_cast<std::size_t>(n);
    return c;
  }
  template <class... I>
  std::size_t offset(I... idx) const noexcept {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int n_ = 0;
  std::vector<cplx> data_;
};

using Tensor3 = CubeTensor<3>;
using Tensor4 = CubeTensor<4>;

}  // namespace kf

#endif  // KF_TENSOR_HPP
