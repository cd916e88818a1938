#ifndef KF_FROBENIUS_HPP
#define KF_FROBENIUS_HPP

// Algebra structures on tangent fibers and the pencil of connections
// nabla_lambda = nabla_0 + lambda * (X o Y).

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kf/expr.hpp"
#include "kf/kahler.hpp"
#include "kf/tensor.hpp"

namespace kf::frobenius {

using kahler::CMatrix;

// Finite-dimensional complex algebra e_i o e_j = sum_k C(k, i, j) e_k with a
// bilinear form form(i, j) = <e_i, e_j>.
struct FiberAlgebra {
  int dim = 0;
  Tensor3 C;
  CMatrix form;
  std::optional<std::vector<cplx>> unit;

  explicit FiberAlgebra(int n = 0) : dim(n), C(n), form(CMatrix::Zero(n, n)) {}
};

std::vector<cplx> multiply(const FiberAlgebra& alg, std::span<const cplx> x, std::span<const cplx> y);

// max |C^k_ij - C^k_ji|
double commutator(const FiberAlgebra& alg);
// max over basis triples and components of |(e_i o e_j) o e_k - e_i o (e_j o e_k)|
double associator(const FiberAlgebra& alg);
// max over basis triples of |<e_i o e_j, e_k> - <e_i, e_j o e_k>|
double frobenius_compat(const FiberAlgebra& alg);

// Least-squares solution of e o x = x over the basis; returned when the
// worst residual is below unit_tolerance.
inline constexpr double unit_tolerance = 1e-8;
std::optional<std::vector<cplx>> find_unit(const FiberAlgebra& alg);

// Holomorphic fiber algebra (C = Gamma, zero form on T^{1,0}) and its
// antiholomorphic counterpart (C = conj Gamma). Units are filled in when
// they exist.
std::pair<FiberAlgebra, FiberAlgebra> fiber_algebra_from_metric(const kahler::MetricData& md);

// T^{1,0} + T^{0,1} with block-diagonal product and the form pairing the
// two blocks through g_{a bbar}.
FiberAlgebra direct_sum_algebra(const kahler::MetricData& md);

// e_i o (e_j o e_k) - e_j o (e_i o e_k)
std::vector<cplx> curvature_via_algebra(const FiberAlgebra& alg, int i, int j, int k);
std::vector<cplx> curvature_via_algebra(const kahler::MetricData& md, int i, int j, int k);

// Curvature 2-form of the connection with chart Christoffels lambda * Gamma
// in the flat gauge (background Christoffels zero):
//   holomorphic(b, a, i, l) = F^b_{a, i l}
//       = lambda (d_i Gamma^b_{la} - d_l Gamma^b_{ia})
//         + lambda^2 sum_m (Gamma^b_{im} Gamma^m_{la} - Gamma^b_{lm} Gamma^m_{ia})
//   mixed(b, a, i, k) = F^b_{a, i kbar} = -lambda dbar_k Gamma^b_{ia}
// The (0,2) block vanishes identically.
struct PencilCurvature {
  double lambda = 0.0;
  Tensor4 holomorphic;
  Tensor4 mixed;
};

PencilCurvature pencil_curvature_tensor(const kahler::MetricData& md, double lambda);

// g-trace tr(F)^b_a = sum_{i,k} g^{i kbar} F^b_{a i kbar} as a matrix (a, b).
CMatrix hermitian_einstein_endomorphism(const kahler::MetricData& md, double lambda);

// max |tr(F_lambda) - kappa Id|, kappa the mean diagonal entry.
double hermitian_einstein_trace(const kahler::MetricData& md, double lambda);

struct PencilSample {
  double lambda = 0.0;
  double curvature_norm = 0.0;
  double trace_norm = 0.0;
};

PencilSample pencil_curvature(const kahler::MetricData& md, double lambda);

inline const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> grid{-1.0, -0.5, 0.5, 1.0, 2.0};
  return grid;
}

struct AffineCheck {
  bool affine = false;
  double residual = 0.0;
};

// E is affine iff every second Wirtinger derivative of every coefficient
// E^m vanishes; checked at the given points below affine_tolerance.
inline constexpr double affine_tolerance = 1e-10;
AffineCheck affine_vector_field_check(std::span<const expr::Expr> field, int dim,
                                      std::span<const std::vector<cplx>> points);

}  // namespace kf::frobenius

#endif  // KF_FROBENIUS_HPP
