#include "kf/kahler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kf/errors.hpp"
#include "kf/kernels.hpp"

namespace kf::kahler {
namespace {

using wirtinger::Jet;

// Partial derivative of the jet along the listed holomorphic and
// antiholomorphic directions.
class Partials {
 public:
  Partials(const Jet& jet) : jet_(jet), alpha_(jet.dim()), beta_(jet.dim()) {}

  cplx operator()(std::initializer_list<int> hol, std::initializer_list<int> anti) {
    std::ranges::fill(alpha_, 0);
    std::ranges::fill(beta_, 0);
    for (int a : hol) ++alpha_[a];
    for (int b : anti) ++beta_[b];
    return wirtinger::partial(jet_, alpha_, beta_);
  }

 private:
  const Jet& jet_;
  std::vector<int> alpha_, beta_;
};

// Row-major copy of an Eigen matrix.
std::vector<cplx> rows_of(const CMatrix& m) {
  std::vector<cplx> out(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

}  // namespace

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MetricData metric_from_jet(const Jet& jet, const ChartPoint& p) {
  const int n = jet.dim();
  if (static_cast<int>(p.coordinates.size()) != n) throw std::invalid_argument("metric_from_jet: point length != dim");
  for (const auto& c : p.coordinates)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("chart point has non-finite entries");

  MetricData md;
  md.dim = n;
  md.point = p;
  md.potential = jet.value();
  if (std::abs(md.potential.imag()) > realness_tolerance * std::max(1.0, std::abs(md.potential)))
    throw DomainError("potential is not real-valued at the sample point");

  Partials d(jet);
  md.g.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) md.g(a, b) = d({a}, {b});

  Eigen::JacobiSVD<CMatrix> svd(md.g);
  const auto& sv = svd.singularValues();
  md.max_singular = sv(0);
  md.min_singular = sv(n - 1);
  if (!(md.max_singular > 0.0) || md.min_singular < degeneracy_floor * md.max_singular)
    throw DegenerateMetric("metric is degenerate at the sample point (singular value ratio " +
                           std::to_string(md.max_singular > 0.0 ? md.min_singular / md.max_singular : 0.0) + ")");
  md.condition = md.max_singular / md.min_singular;

  Eigen::PartialPivLU<CMatrix> lu(md.g);
  md.g_inv = lu.inverse();

  const CMatrix herm = (md.g + md.g.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  md.positive_definite = eig.eigenvalues().minCoeff() > 0.0;

  md.phi3 = Tensor3(n);
  md.phi3_bar = Tensor3(n);
  md.ddbar_g = Tensor4(n);
  md.dd_g = Tensor4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        md.phi3(a, b, c) = d({a, b}, {c});
        md.phi3_bar(a, b, c) = d({c}, {a, b});
        for (int e = 0; e < n; ++e) {
          md.ddbar_g(a, b, c, e) = d({a, c}, {b, e});
          md.dd_g(a, b, c, e) = d({a, c, e}, {b});
        }
      }

  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::vector<cplx> ginv = rows_of(md.g_inv);
  std::vector<cplx> ginv_conj(ginv.size());
  std::ranges::transform(ginv, ginv_conj.begin(), [](cplx x) { return std::conj(x); });

  // Gamma[(i,j), k] = sum_e phi3[(i,j), e] ginv[e, k]
  std::vector<cplx> tmp(nn * n);
  md.christoffel = Tensor3(n);
  md.christoffel_bar = Tensor3(n);
  kernels::matmul(md.phi3.data(), ginv, tmp, nn, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) md.christoffel(k, i, j) = tmp[(i * n + j) * n + k];
  kernels::matmul(md.phi3_bar.data(), ginv_conj, tmp, nn, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) md.christoffel_bar(k, i, j) = tmp[(i * n + j) * n + k];

  // W[(c,a), (b,d)] = sum_{gamma,e} phi3(c,a,gamma) ginv(gamma,e) phi3_bar(b,d,e)
  std::vector<cplx> y(nn * n), z(n * nn), w(nn * nn);
  kernels::matmul(md.phi3.data(), ginv, y, nn, n, n);
  for (int b = 0; b < n; ++b)
    for (int dd = 0; dd < n; ++dd)
      for (int e = 0; e < n; ++e) z[e * nn + b * n + dd] = md.phi3_bar(b, dd, e);
  kernels::matmul(y, z, w, nn, n, nn);

  md.curvature = Tensor4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int dd = 0; dd < n; ++dd)
          md.curvature(a, b, c, dd) = md.ddbar_g(a, b, c, dd) - w[(c * n + a) * nn + b * n + dd];

  md.ricci = CMatrix::Zero(n, n);
  for (int c = 0; c < n; ++c)
    for (int dd = 0; dd < n; ++dd) {
      cplx s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += md.g_inv(b, a) * md.curvature(a, b, c, dd);
      md.ricci(c, dd) = s;
    }
  return md;
}

MetricData metric_at(const expr::PotentialExpr& phi, const ChartPoint& p) {
  return metric_from_jet(wirtinger::jet_eval(phi, p.coordinates), p);
}

KahlerResiduals kahler_residuals(const MetricData& md, const Jet& jet) {
  const int n = md.dim;
  KahlerResiduals r;
  Partials d(jet);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      r.closure = std::max(r.closure, std::abs(md.g(a, b) - d({a}, {b})));
      for (int c = 0; c < n; ++c) {
        // d_a g_{b cbar} - d_b g_{a cbar}
        r.closure = std::max(r.closure, std::abs(md.phi3(a, b, c) - md.phi3(b, a, c)));
        // dbar_c g_{a bbar} - dbar_b g_{a cbar}
        r.closure = std::max(r.closure, std::abs(md.phi3_bar(b, c, a) - md.phi3_bar(c, b, a)));
        r.closure = std::max(r.closure, std::abs(md.phi3(a, b, c) - d({a, b}, {c})));
        r.closure = std::max(r.closure, std::abs(md.phi3_bar(a, b, c) - d({c}, {a, b})));
        r.rank3_symmetry = std::max(r.rank3_symmetry, std::abs(md.phi3(a, b, c) - md.phi3(b, a, c)));
      }
    }
  return r;
}

double wdvv_residual_at(const MetricData& md) {
  const int n = md.dim;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::vector<cplx> ginv = rows_of(md.g_inv);

  // lhs[(a,b), (c,d)] = sum_{e,f} phi3(a,b,e) ginv(e,f) phi3_bar(c,d,f)
  std::vector<cplx> y(nn * n), z(n * nn), lhs(nn * nn);
  kernels::matmul(md.phi3.data(), ginv, y, nn, n, n);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d)
      for (int f = 0; f < n; ++f) z[f * nn + c * n + d] = md.phi3_bar(c, d, f);
  kernels::matmul(y, z, lhs, nn, n, nn);

  // rhs[(b,c), (a,d)] = sum_{e,f} phi3_bar(c,e,b) ginv(e,f) phi3(f,a,d)
  std::vector<cplx> u(nn * n), rhs(nn * nn);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e) u[(b * n + c) * n + e] = md.phi3_bar(c, e, b);
  kernels::matmul(u, ginv, y, nn, n, n);
  kernels::matmul(y, md.phi3.data(), rhs, nn, n, nn);

  double res = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          res = std::max(res, std::abs(lhs[(a * n + b) * nn + c * n + d] - rhs[(b * n + c) * nn + a * n + d]));
  return res;
}

RicciCheck ricci_c1_check(const MetricData& md) {
  return {max_abs(md.ricci - md.ricci.adjoint()), max_abs(md.ricci)};
}

CMatrix chern_form(const MetricData& md) {
  return md.ricci * cplx{0.0, 1.0 / (2.0 * std::numbers::pi)};
}

}  // namespace kf::kahler
