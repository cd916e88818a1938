#include <cmath>

#include "doctest.h"
#include "kf/catalog.hpp"
#include "kf/frobenius.hpp"
#include "oracles.hpp"

namespace F = kf::frobenius;
namespace K = kf::kahler;
namespace E = kf::expr;
using kf::cplx;

namespace {

F::FiberAlgebra algebra(int n, std::initializer_list<std::tuple<int, int, int, cplx>> entries) {
  F::FiberAlgebra alg(n);
  for (const auto& [k, i, j, v] : entries) alg.C(k, i, j) = v;
  return alg;
}

// Brute-force associator over basis triples, written out with explicit sums.
double brute_associator(const F::FiberAlgebra& alg) {
  const int n = alg.dim;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int out = 0; out < n; ++out) {
          cplx left = 0.0, right = 0.0;
          for (int m = 0; m < n; ++m) {
            left += alg.C(m, i, j) * alg.C(out, m, k);
            right += alg.C(m, j, k) * alg.C(out, i, m);
          }
          worst = std::max(worst, std::abs(left - right));
        }
  return worst;
}

F::FiberAlgebra random_algebra(kf::Rng& rng, int n) {
  F::FiberAlgebra alg(n);
  for (auto& c : alg.C.data()) c = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return alg;
}

K::MetricData at(const E::PotentialExpr& p, std::vector<cplx> z) { return K::metric_at(p, K::ChartPoint{std::move(z)}); }

}  // namespace

TEST_CASE("commutator") {
  CHECK(F::commutator(algebra(1, {{0, 0, 0, 1.0}})) == 0.0);
  CHECK(F::commutator(algebra(2, {{0, 0, 1, 1.0}})) == 1.0);
  kf::Rng rng(1);
  const auto md = at(oracle::random_polynomial(rng, 2).expression(), {{0.1, 0.2}, {-0.3, 0.1}});
  const auto [hol, anti] = F::fiber_algebra_from_metric(md);
  CHECK(F::commutator(hol) < 1e-12);
  CHECK(F::commutator(anti) < 1e-12);
}

TEST_CASE("associator") {
  CHECK(F::associator(algebra(1, {{0, 0, 0, cplx{2.5, -1.0}}})) == 0.0);
  CHECK(F::associator(F::FiberAlgebra(3)) == 0.0);

  // e1 e1 = e1, e1 e2 = e2 e1 = e2, e2 e2 = e1: brute force gives 0.
  const auto z2 = algebra(2, {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}, {1, 1, 0, 1.0}, {0, 1, 1, 1.0}});
  CHECK(brute_associator(z2) == 0.0);
  CHECK(F::associator(z2) == 0.0);

  // e1 e1 = e2, everything else zero: (e1 e1) e1 = 0 but e1 (e1 e1) = 0 too;
  // e2 e1 = e1 breaks it: (e1 e1) e1 = e2 e1 = e1, e1 (e1 e1) = e1 e2 = 0.
  const auto broken = algebra(2, {{1, 0, 0, 1.0}, {0, 1, 0, 1.0}});
  CHECK(brute_associator(broken) == 1.0);
  CHECK(F::associator(broken) == 1.0);

  kf::Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto alg = random_algebra(rng, 3);
    CHECK(std::abs(F::associator(alg) - brute_associator(alg)) < 1e-14);
  }
}

TEST_CASE("Frobenius compatibility of the bilinear form") {
  F::FiberAlgebra zero(2);
  zero.form = K::CMatrix::Identity(2, 2);
  CHECK(F::frobenius_compat(zero) == 0.0);

  auto z2 = algebra(2, {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}, {1, 1, 0, 1.0}, {0, 1, 1, 1.0}});
  z2.form = K::CMatrix::Identity(2, 2);
  CHECK(F::frobenius_compat(z2) == 0.0);

  z2.C(1, 0, 1) += 1e-2;
  CHECK(F::frobenius_compat(z2) >= 1e-2);
}

TEST_CASE("unit search") {
  const auto one = F::find_unit(algebra(1, {{0, 0, 0, 1.0}}));
  REQUIRE(one);
  CHECK(std::abs((*one)[0] - 1.0) < 1e-12);

  CHECK_FALSE(F::find_unit(F::FiberAlgebra(2)));

  const auto diag = F::find_unit(algebra(3, {{0, 0, 0, 1.0}, {1, 1, 1, 1.0}, {2, 2, 2, 1.0}}));
  REQUIRE(diag);
  for (const auto& c : *diag) CHECK(std::abs(c - 1.0) < 1e-12);
}

TEST_CASE("metric-derived algebras") {
  SUBCASE("flat torus gives zero algebras") {
    const auto md = at(kf::catalog::flat_potential(2), {0.2, 0.4});
    const auto [hol, anti] = F::fiber_algebra_from_metric(md);
    CHECK(hol.C.max_abs() == 0.0);
    CHECK(anti.C.max_abs() == 0.0);
    CHECK_FALSE(hol.unit);
  }
  SUBCASE("scalar Christoffel of |z|^2 + |z|^4/4 at 0.5") {
    const auto md = at(E::parse("z1*zbar1 + 0.25*(z1*zbar1)^2", 1), {0.5});
    const auto [hol, anti] = F::fiber_algebra_from_metric(md);
    // d_z g / g = zbar / (1 + |z|^2) = 0.4
    CHECK(std::abs(hol.C(0, 0, 0) - 0.4) < 1e-14);
    CHECK(std::abs(anti.C(0, 0, 0) - 0.4) < 1e-14);
  }
}

TEST_CASE("algebraic curvature") {
  const auto flat = at(kf::catalog::flat_potential(2), {0.1, 0.1});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (const auto& c : F::curvature_via_algebra(flat, i, j, k)) CHECK(c == cplx(0.0));

  const auto broken = algebra(2, {{1, 0, 0, 1.0}, {0, 1, 0, 1.0}});
  // e1 (e2 e1) - e2 (e1 e1) = e1 e1 - e2 e2 = e2.
  const auto v = F::curvature_via_algebra(broken, 0, 1, 0);
  CHECK(v[0] == cplx(0.0));
  CHECK(v[1] == cplx(1.0));

  kf::Rng rng(3);
  const auto alg = random_algebra(rng, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const auto a = F::curvature_via_algebra(alg, i, j, k);
        const auto b = F::curvature_via_algebra(alg, j, i, k);
        for (int m = 0; m < 3; ++m) CHECK(a[m] + b[m] == cplx(0.0));
      }
}

TEST_CASE("pencil of connections") {
  const auto flat = at(kf::catalog::flat_potential(2), {0.3, -0.1});
  for (double lambda : {-1.0, 0.5, 1.0, 2.0}) {
    const auto s = F::pencil_curvature(flat, lambda);
    CHECK(s.curvature_norm < 1e-10);
    CHECK(s.trace_norm < 1e-10);
  }

  kf::Rng rng(4);
  const auto fs = at(E::parse("log(1 + z1*zbar1 + z2*zbar2)", 2), {0.3, 0.1});
  CHECK(F::pencil_curvature(fs, 0.0).curvature_norm == 0.0);
  CHECK(F::pencil_curvature(fs, 1.0).curvature_norm > 0.1);

  SUBCASE("the Chern member has no (2,0) curvature") {
    for (int t = 0; t < 3; ++t) {
      const auto md = at(oracle::random_polynomial(rng, 2).expression(), oracle::random_point(rng, 2, 0.5));
      CHECK(F::pencil_curvature_tensor(md, 1.0).holomorphic.max_abs() < 1e-12);
    }
  }

  SUBCASE("curvature is exactly quadratic in lambda") {
    for (int t = 0; t < 3; ++t) {
      const auto md = at(oracle::random_polynomial(rng, 2).expression(), oracle::random_point(rng, 2, 0.5));
      const auto p1 = F::pencil_curvature_tensor(md, 1.0), p2 = F::pencil_curvature_tensor(md, 2.0),
                 p3 = F::pencil_curvature_tensor(md, 3.0), p4 = F::pencil_curvature_tensor(md, 4.0);
      for (std::size_t i = 0; i < p4.holomorphic.size(); ++i) {
        const auto pred = [&](const kf::Tensor4 F::PencilCurvature::*block) {
          return (p1.*block).data()[i] - 3.0 * (p2.*block).data()[i] + 3.0 * (p3.*block).data()[i];
        };
        const cplx h4 = p4.holomorphic.data()[i], m4 = p4.mixed.data()[i];
        CHECK(std::abs(pred(&F::PencilCurvature::holomorphic) - h4) <= 1e-8 * std::max(1.0, std::abs(h4)));
        CHECK(std::abs(pred(&F::PencilCurvature::mixed) - m4) <= 1e-8 * std::max(1.0, std::abs(m4)));
      }
    }
  }

  SUBCASE("mixed block matches differences of the Christoffel symbols") {
    const auto poly = oracle::random_polynomial(rng, 2);
    const auto p = poly.expression();
    const auto z = oracle::random_point(rng, 2, 0.4);
    const auto md = at(p, z);
    const auto pc = F::pencil_curvature_tensor(md, 1.0);
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) {
          // Gamma^b_{ia} as a function of the point.
          oracle::RealPartials rp([&](const std::vector<cplx>& w) { return at(p, w).christoffel(b, i, a); }, z, 0.02);
          for (int k = 0; k < 2; ++k) {
            const cplx dbar = oracle::wirtinger(rp, 2, {0, 0}, oracle::unit(2, k));
            CHECK(std::abs(pc.mixed(b, a, i, k) + dbar) < 1e-7);
          }
        }
  }
}

TEST_CASE("Hermitian-Einstein trace against the Ricci contraction") {
  kf::Rng rng(5);
  const auto log1 = at(E::parse("log(1 + z1*zbar1)", 1), {0.0});
  const auto k1 = F::hermitian_einstein_endomorphism(log1, 1.0);
  CHECK(std::abs(k1(0, 0) - 2.0) < 1e-13);
  for (int t = 0; t < 3; ++t) {
    const auto md = at(oracle::random_polynomial(rng, 2).expression(), oracle::random_point(rng, 2, 0.5));
    const auto k = F::hermitian_einstein_endomorphism(md, 1.0);
    CHECK(K::max_abs(k + md.ricci * md.g_inv) < 1e-9);
  }
  const auto flat = at(kf::catalog::flat_potential(3), {0.1, 0.2, 0.3});
  for (double lambda : F::default_lambda_grid()) CHECK(F::hermitian_einstein_trace(flat, lambda) == 0.0);
}

TEST_CASE("flatness implies associativity and WDVV at every probe point") {
  kf::Rng rng(6);
  std::vector<E::PotentialExpr> potentials;
  for (const auto& e : kf::catalog::full_catalog())
    if (e.potential) potentials.push_back(*e.potential);
  for (int t = 0; t < 3; ++t) potentials.push_back(oracle::random_polynomial(rng, 2).expression());
  int flat_points = 0, curved_points = 0;
  for (const auto& p : potentials)
    for (int i = 0; i < 10; ++i) {
      const auto md = at(p, oracle::random_point(rng, p.dim, 0.5));
      const auto [hol, anti] = F::fiber_algebra_from_metric(md);
      if (md.curvature.max_abs() < 1e-9) {
        ++flat_points;
        CHECK(K::wdvv_residual_at(md) < 1e-9);
        CHECK(F::associator(hol) < 1e-9);
      } else {
        ++curved_points;
      }
    }
  CHECK(flat_points > 0);
  CHECK(curved_points > 0);
}

TEST_CASE("affine vector fields") {
  const std::vector<std::vector<cplx>> pts{{0.1, 0.2}, {{0.3, -0.4}, {0.5, 0.1}}};
  const std::vector<E::Expr> euler{E::z(0), E::z(1)};
  const auto a = F::affine_vector_field_check(euler, 2, pts);
  CHECK(a.affine);
  CHECK(a.residual == 0.0);

  const std::vector<E::Expr> affine{E::parse("3*z1 + 2", 2).root, E::parse("1 - z2", 2).root};
  CHECK(F::affine_vector_field_check(affine, 2, pts).affine);

  const std::vector<E::Expr> square{E::power(E::z(0), 2), E::constant(0.0)};
  const auto s = F::affine_vector_field_check(square, 2, pts);
  CHECK_FALSE(s.affine);
  CHECK(std::abs(s.residual - 2.0) < 1e-14);
}
