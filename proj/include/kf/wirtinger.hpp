#ifndef KF_WIRTINGER_HPP
#define KF_WIRTINGER_HPP

// Forward-mode differentiation in the 2n formal variables (z_1..z_n,
// zbar_1..zbar_n) by truncated power series. A Jet holds every Taylor
// coefficient c_{alpha,beta} with |alpha| + |beta| <= 4, so
//
//   d^alpha dbar^beta Phi (p) = alpha! beta! c_{alpha,beta}.
//
// Storage is dense over the monomial simplex; C(2n + 4, 4) coefficients
// (15, 70, 210, 495 for n = 1..4). The cost of a product grows like n^8.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kf/expr.hpp"
#include "kf/kernels.hpp"

namespace kf::wirtinger {

using cplx = std::complex<double>;

inline constexpr int jet_order = 4;

// Exponents of a monomial z^alpha zbar^beta.
struct MultiIndexPair {
  std::vector<int> alpha;
  std::vector<int> beta;

  int total() const noexcept;
};

// Monomial enumeration and product table for one chart dimension. Shared by
// every jet of that dimension; built once on first use.
class JetLayout {
 public:
  explicit JetLayout(int dim);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return degree_.size(); }

  // Index of the monomial, or npos when outside the simplex.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index_of(std::span<const int> alpha, std::span<const int> beta) const noexcept;

  // Exponent of variable v (0..2n-1; n..2n-1 are the conjugates) in monomial m.
  int exponent(std::size_t m, int v) const noexcept { return exps_[m * 2 * dim_ + v]; }
  int degree(std::size_t m) const noexcept { return degree_[m]; }

  // alpha! beta! for monomial m.
  double factorial_weight(std::size_t m) const noexcept { return weight_[m]; }

  // Index of the monomial with alpha and beta exchanged.
  std::size_t conjugate_index(std::size_t m) const noexcept { return conj_[m]; }

  kernels::ProductTable product_table() const noexcept {
    return {offsets_, lhs_, rhs_};
  }

  static std::shared_ptr<const JetLayout> for_dim(int dim);

 private:
  std::uint64_t key(std::span<const std::uint8_t> e) const noexcept;

  int dim_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<double> weight_;
  std::vector<std::size_t> conj_;
  std::vector<std::pair<std::uint64_t, std::size_t>> lookup_;  // sorted by key
  std::vector<std::uint32_t> offsets_, lhs_, rhs_;
};

class Jet {
 public:
  explicit Jet(int dim);
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<cplx> coeffs);

  static Jet constant(int dim, cplx c);

  int dim() const noexcept { return layout_->dim(); }
  const JetLayout& layout() const noexcept { return *layout_; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  cplx value() const noexcept { return coeffs_[0]; }
  cplx coeff(const MultiIndexPair& idx) const;

  Jet conj() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::vector<cplx> coeffs_;
};

Jet exp(const Jet& x);
// Principal branch; throws DomainError when |value| < log_singularity_floor.
Jet log(const Jet& x);
Jet pow(const Jet& x, int k);
Jet re(const Jet& x);
Jet im(const Jet& x);

// Coordinate jets at the point: z_1..z_n followed by zbar_1..zbar_n.
// Only order 4 is supported.
std::vector<Jet> seed(std::span<const cplx> point, int order = jet_order);

Jet jet_eval(const expr::PotentialExpr& phi, std::span<const cplx> point);
// Evaluates an expression over a chart of the given dimension.
Jet jet_eval(const expr::Expr& e, std::span<const cplx> point);

// alpha! beta! * coefficient, i.e. the mixed Wirtinger partial.
cplx partial(const Jet& jet, const MultiIndexPair& idx);
cplx partial(const Jet& jet, std::span<const int> alpha, std::span<const int> beta);

}  // namespace kf::wirtinger

#endif  // KF_WIRTINGER_HPP
