#include "kf/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kf/wirtinger.hpp"

namespace kf::frobenius {

std::vector<cplx> multiply(const FiberAlgebra& alg, std::span<const cplx> x, std::span<const cplx> y) {
  const int n = alg.dim;
  std::vector<cplx> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx s = x[i] * y[j];
      if (s == 0.0) continue;
      for (int k = 0; k < n; ++k) out[k] += s * alg.C(k, i, j);
    }
  return out;
}

double commutator(const FiberAlgebra& alg) {
  const int n = alg.dim;
  double r = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r = std::max(r, std::abs(alg.C(k, i, j) - alg.C(k, j, i)));
  return r;
}

double associator(const FiberAlgebra& alg) {
  const int n = alg.dim;
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p) {
          cplx left = 0.0, right = 0.0;
          for (int m = 0; m < n; ++m) {
            left += alg.C(m, i, j) * alg.C(p, m, k);
            right += alg.C(m, j, k) * alg.C(p, i, m);
          }
          r = std::max(r, std::abs(left - right));
        }
  return r;
}

double frobenius_compat(const FiberAlgebra& alg) {
  const int n = alg.dim;
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cplx left = 0.0, right = 0.0;
        for (int m = 0; m < n; ++m) {
          left += alg.C(m, i, j) * alg.form(m, k);
          right += alg.C(m, j, k) * alg.form(i, m);
        }
        r = std::max(r, std::abs(left - right));
      }
  return r;
}

std::optional<std::vector<cplx>> find_unit(const FiberAlgebra& alg) {
  const int n = alg.dim;
  if (n == 0) return std::nullopt;
  // Row (j, k): sum_i u_i C^k_{ij} = delta_jk.
  CMatrix m(n * n, n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) m(j * n + k, i) = alg.C(k, i, j);
      if (j == k) rhs(j * n + k) = 1.0;
    }
  const Eigen::VectorXcd u = m.completeOrthogonalDecomposition().solve(rhs);
  const double residual = (m * u - rhs).cwiseAbs().maxCoeff();
  if (!(residual < unit_tolerance)) return std::nullopt;
  return std::vector<cplx>(u.data(), u.data() + n);
}

std::pair<FiberAlgebra, FiberAlgebra> fiber_algebra_from_metric(const kahler::MetricData& md) {
  FiberAlgebra hol(md.dim), anti(md.dim);
  hol.C = md.christoffel;
  anti.C = md.christoffel_bar;
  hol.unit = find_unit(hol);
  anti.unit = find_unit(anti);
  return {std::move(hol), std::move(anti)};
}

FiberAlgebra direct_sum_algebra(const kahler::MetricData& md) {
  const int n = md.dim;
  FiberAlgebra alg(2 * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        alg.C(k, i, j) = md.christoffel(k, i, j);
        alg.C(n + k, n + i, n + j) = md.christoffel_bar(k, i, j);
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      alg.form(a, n + b) = md.g(a, b);
      alg.form(n + b, a) = md.g(a, b);
    }
  alg.unit = find_unit(alg);
  return alg;
}

std::vector<cplx> curvature_via_algebra(const FiberAlgebra& alg, int i, int j, int k) {
  const int n = alg.dim;
  if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
    throw std::out_of_range("curvature_via_algebra: direction index out of range");
  std::vector<cplx> out(n);
  for (int p = 0; p < n; ++p) {
    cplx first = 0.0, second = 0.0;
    for (int m = 0; m < n; ++m) {
      first += alg.C(m, j, k) * alg.C(p, i, m);
      second += alg.C(m, i, k) * alg.C(p, j, m);
    }
    out[p] = first - second;
  }
  return out;
}

std::vector<cplx> curvature_via_algebra(const kahler::MetricData& md, int i, int j, int k) {
  return curvature_via_algebra(fiber_algebra_from_metric(md).first, i, j, k);
}

namespace {

// d_i Gamma^b_{la} stored (b, l, a, i) and dbar_k Gamma^b_{la} stored (b, l, a, k).
struct ChristoffelDerivatives {
  Tensor4 hol;
  Tensor4 anti;
};

ChristoffelDerivatives christoffel_derivatives(const kahler::MetricData& md) {
  const int n = md.dim;
  const auto& gi = md.g_inv;
  // d ginv(e, b) = -sum_{p,q} ginv(e, p) d g(p, q) ginv(q, b)
  Tensor3 dginv(n), dbar_ginv(n);  // (i, e, b)
  for (int i = 0; i < n; ++i) {
    CMatrix dg(n, n), dbg(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        dg(p, q) = md.phi3(i, p, q);
        dbg(p, q) = md.phi3_bar(q, i, p);
      }
    const CMatrix a = -gi * dg * gi;
    const CMatrix b = -gi * dbg * gi;
    for (int e = 0; e < n; ++e)
      for (int c = 0; c < n; ++c) {
        dginv(i, e, c) = a(e, c);
        dbar_ginv(i, e, c) = b(e, c);
      }
  }

  ChristoffelDerivatives out{Tensor4(n), Tensor4(n)};
  for (int b = 0; b < n; ++b)
    for (int l = 0; l < n; ++l)
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) {
          cplx h = 0.0, v = 0.0;
          for (int e = 0; e < n; ++e) {
            h += md.dd_g(a, e, l, i) * gi(e, b) + md.phi3(l, a, e) * dginv(i, e, b);
            v += md.ddbar_g(a, e, l, i) * gi(e, b) + md.phi3(l, a, e) * dbar_ginv(i, e, b);
          }
          out.hol(b, l, a, i) = h;
          out.anti(b, l, a, i) = v;
        }
  return out;
}

}  // namespace

PencilCurvature pencil_curvature_tensor(const kahler::MetricData& md, double lambda) {
  const int n = md.dim;
  const auto d = christoffel_derivatives(md);
  const auto& G = md.christoffel;
  PencilCurvature f{lambda, Tensor4(n), Tensor4(n)};
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
          cplx quad = 0.0;
          for (int m = 0; m < n; ++m) quad += G(b, i, m) * G(m, l, a) - G(b, l, m) * G(m, i, a);
          f.holomorphic(b, a, i, l) = lambda * (d.hol(b, l, a, i) - d.hol(b, i, a, l)) + lambda * lambda * quad;
          f.mixed(b, a, i, l) = -lambda * d.anti(b, i, a, l);
        }
  return f;
}

CMatrix hermitian_einstein_endomorphism(const kahler::MetricData& md, double lambda) {
  const int n = md.dim;
  const auto f = pencil_curvature_tensor(md, lambda);
  CMatrix k = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < n; ++kk) s += md.g_inv(kk, i) * f.mixed(b, a, i, kk);
      k(a, b) = s;
    }
  return k;
}

namespace {

double trace_defect(const CMatrix& k) {
  const int n = static_cast<int>(k.rows());
  const cplx kappa = k.trace() / static_cast<double>(n);
  return kahler::max_abs(k - kappa * CMatrix::Identity(n, n));
}

}  // namespace

double hermitian_einstein_trace(const kahler::MetricData& md, double lambda) {
  return trace_defect(hermitian_einstein_endomorphism(md, lambda));
}

PencilSample pencil_curvature(const kahler::MetricData& md, double lambda) {
  const auto f = pencil_curvature_tensor(md, lambda);
  const int n = md.dim;
  CMatrix k = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < n; ++kk) k(a, b) += md.g_inv(kk, i) * f.mixed(b, a, i, kk);
  return {lambda, std::max(f.holomorphic.max_abs(), f.mixed.max_abs()), trace_defect(k)};
}

AffineCheck affine_vector_field_check(std::span<const expr::Expr> field, int dim,
                                      std::span<const std::vector<cplx>> points) {
  if (static_cast<int>(field.size()) != dim)
    throw std::invalid_argument("affine_vector_field_check: field size != chart dimension");
  auto layout = wirtinger::JetLayout::for_dim(dim);
  AffineCheck out;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("affine_vector_field_check: point size");
    for (const auto& coeff : field) {
      const auto jet = wirtinger::jet_eval(coeff, p);
      for (std::size_t m = 0; m < layout->size(); ++m)
        if (layout->degree(m) == 2)
          out.residual = std::max(out.residual, std::abs(jet.coeffs()[m]) * layout->factorial_weight(m));
    }
  }
  out.affine = out.residual < affine_tolerance;
  return out;
}

}  // namespace kf::frobenius
