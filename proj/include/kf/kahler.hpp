#ifndef KF_KAHLER_HPP
#define KF_KAHLER_HPP

// Pointwise Kähler geometry of a chart potential Phi.
//
// Index conventions (all 0-based):
//   g(a, b)               = g_{a bbar} = d_a dbar_b Phi
//   g_inv(e, f)           = g^{ebar f}, so sum_e g(a, e) g_inv(e, f) = delta_af
//   phi3(a, b, c)         = Phi_{a b cbar} = d_a g_{b cbar}
//   phi3_bar(a, b, c)     = Phi_{abar bbar c} = conj(phi3(a, b, c)) for real Phi
//   christoffel(k, i, j)  = Gamma^k_{ij} = sum_e Phi_{i j ebar} g^{ebar k}
//   curvature(a, b, c, d) = R_{a bbar c dbar}
//                         = d_c dbar_d g_{a bbar}
//                           - sum g^{gammabar e} (d_c g_{a gammabar})(dbar_d g_{e bbar})
//   ricci(c, d)           = sum_{a,b} g^{bbar a} R_{a bbar c dbar}
//
// With this sign convention the unit-disc potential log(1 + |z|^2) has
// R_{1 1bar 1 1bar} = -2 at the origin.

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "kf/expr.hpp"
#include "kf/tensor.hpp"
#include "kf/wirtinger.hpp"

namespace kf::kahler {

using CMatrix = Eigen::MatrixXcd;

struct ChartPoint {
  std::vector<cplx> coordinates;
  std::string chart = "chart0";
};

// Smallest admissible ratio min/max singular value of g.
inline constexpr double degeneracy_floor = 1e-8;
// Allowed |Im Phi| relative to max(1, |Phi|).
inline constexpr double realness_tolerance = 1e-12;

struct MetricData {
  int dim = 0;
  ChartPoint point;
  cplx potential;

  CMatrix g;
  CMatrix g_inv;
  Tensor3 phi3;
  Tensor3 phi3_bar;
  Tensor3 christoffel;
  Tensor3 christoffel_bar;
  // ddbar_g(a, b, c, d) = d_c dbar_d g_{a bbar};  dd_g(a, b, c, d) = d_c d_d g_{a bbar}.
  Tensor4 ddbar_g;
  Tensor4 dd_g;
  Tensor4 curvature;
  CMatrix ricci;

  double min_singular = 0.0;
  double max_singular = 0.0;
  double condition = 0.0;
  bool positive_definite = false;
};

// Everything at the point from one order-4 jet of Phi. Throws DomainError
// for a non-real potential or an AD domain failure and DegenerateMetric
// when min_singular < degeneracy_floor * max_singular.
MetricData metric_at(const expr::PotentialExpr& phi, const ChartPoint& p);
MetricData metric_from_jet(const wirtinger::Jet& jet, const ChartPoint& p);

struct KahlerResiduals {
  // Closure d_a g_{b cbar} = d_b g_{a cbar} (and the conjugate identity),
  // together with agreement of the stored g and phi3 with the jet.
  double closure = 0.0;
  // Phi_{a b cbar} = Phi_{b a cbar}.
  double rank3_symmetry = 0.0;
};

KahlerResiduals kahler_residuals(const MetricData& md, const wirtinger::Jet& jet);

// max over (a, b, cbar, dbar) of
//   | sum Phi_{a b ebar} g^{ebar f} Phi_{f cbar dbar} - sum Phi_{b cbar ebar} g^{ebar f} Phi_{f a dbar} |.
double wdvv_residual_at(const MetricData& md);

struct RicciCheck {
  double hermiticity = 0.0;
  double max_abs = 0.0;
};

RicciCheck ricci_c1_check(const MetricData& md);

// (i / 2 pi) R_{a bbar}: coefficient matrix of the first Chern form.
CMatrix chern_form(const MetricData& md);

double max_abs(const CMatrix& m);

}  // namespace kf::kahler

#endif  // KF_KAHLER_HPP
