#ifndef KF_THETA_HPP
#define KF_THETA_HPP

// Theta functions on complex tori V / Lambda. A theta function of type
// (L, J) satisfies
//
//   H(x + l) = e(L(x, l) + J(l)) H(x),   e(w) = exp(2 pi i w),
//
// for every lattice vector l. The concrete realization is the Riemann theta
// series with rational characteristics (alpha, beta):
//
//   theta[alpha, beta](z, tau) = sum_n exp(pi i (n+alpha)^T tau (n+alpha)
//                                          + 2 pi i (n+alpha)^T (z+beta)).

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kf/catalog.hpp"

namespace kf::theta {

using kahler::CMatrix;

struct RiemannThetaSpec {
  CMatrix tau;
  std::vector<double> alpha;
  std::vector<double> beta;
  int level = 1;

  int genus() const noexcept { return static_cast<int>(tau.rows()); }
};

// Throws InputError unless tau is square, symmetric to 1e-12 with
// positive-definite imaginary part, and the characteristics match the genus.
void validate(const RiemannThetaSpec& spec);

RiemannThetaSpec make_spec(CMatrix tau, std::vector<double> alpha = {}, std::vector<double> beta = {}, int level = 1);

inline constexpr int default_radius = 30;

struct ThetaValue {
  cplx value;
  // Estimate of the omitted tail sum_{|n|_inf > R} |term|.
  double tail_bound = 0.0;
  // sum of |term| over the truncated box; the natural scale for cancellation.
  double abs_sum = 0.0;
};

ThetaValue eval_riemann_theta(const RiemannThetaSpec& spec, std::span<const cplx> z, int radius = default_radius);

// Type (L, J) with one entry per lattice generator: L(x, l_k) = L[k] . x.
struct ThetaType {
  int genus = 0;
  catalog::Lattice lattice;
  std::vector<std::vector<cplx>> L;
  std::vector<cplx> J;
};

// Lattice generators e_1..e_g, tau e_1..tau e_g with
//   L(z, e_k) = 0,        J(e_k)     = alpha_k
//   L(z, tau e_k) = -z_k, J(tau e_k) = -tau_kk / 2 - beta_k.
ThetaType riemann_type_of(const RiemannThetaSpec& spec);

// Type of the product of theta functions: (L1 + L2, J1 + J2).
ThetaType multiply_types(const ThetaType& a, const ThetaType& b);

// Trivial type (L = 0, J = 0) on the lattice.
ThetaType trivial_type(const catalog::Lattice& lattice);

// Exponent w with H(x + sum_k m_k l_k) = e(w) H(x), obtained by stepping
// through the generators one at a time (the cocycle extension of L and J).
cplx factor_exponent(const ThetaType& type, std::span<const int> steps, std::span<const cplx> x);

// |H(z + l_k) - e(L(z, l_k) + J(l_k)) H(z)| relative to |e(...)| max(|H(z)|, floor),
// where floor = quasi_floor * (sum of |term| at z) keeps the ratio finite at
// zeros of H.
inline constexpr double quasi_floor = 1e-6;
double quasi_periodicity_residual(const RiemannThetaSpec& spec, std::span<const cplx> z, int generator,
                                  int radius = default_radius);

// Same check for the product theta[a] * theta[b] against multiply_types.
double multiplicativity_residual(const RiemannThetaSpec& a, const RiemannThetaSpec& b, std::span<const cplx> z,
                                 int generator, int radius = default_radius);

inline constexpr double rank_threshold = 1e-8;

struct LevelSpaceResult {
  int dimension = 0;
  std::vector<int> ranks;  // one per re-sampling
  std::vector<double> singular_values;  // first sampling, normalized to the largest
};

// Numerical dimension of the space of level-s theta functions: rank of the
// evaluation matrix of the s^g functions theta[k/s, 0](s z, s tau) together
// with s^g products prod_j theta(z + a_j) (sum_j a_j = 0), which lie in the
// same space. Requires g in {1, 2}, 1 <= s <= 4, samples >= 4 s^g; throws
// InputError when the rank changes across the three re-samplings.
LevelSpaceResult level_space_dimension(const CMatrix& tau, int level, int samples, std::uint64_t seed = 7);

// Point u + tau v of the fundamental domain for u, v in [0, 1)^g.
std::vector<cplx> fundamental_point(const CMatrix& tau, std::span<const double> u, std::span<const double> v);

}  // namespace kf::theta

#endif  // KF_THETA_HPP
