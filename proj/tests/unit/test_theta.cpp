#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kf/errors.hpp"
#include "kf/random.hpp"
#include "kf/theta.hpp"

namespace T = kf::theta;
using kf::cplx;
using T::CMatrix;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

CMatrix tau1(cplx t) {
  CMatrix m(1, 1);
  m(0, 0) = t;
  return m;
}

CMatrix tau2(cplx a, cplx b, cplx d) {
  CMatrix m(2, 2);
  m << a, b, b, d;
  return m;
}

// Plain genus-1 sum over |n| <= 50.
cplx direct_sum(cplx tau, cplx z, double alpha = 0.0, double beta = 0.0) {
  cplx s = 0.0;
  for (int n = -50; n <= 50; ++n) {
    const double m = n + alpha;
    s += std::exp(pi * I * m * m * tau + 2.0 * pi * I * m * (z + beta));
  }
  return s;
}

// Jacobi triple product for theta[0, 0].
cplx triple_product(cplx tau, cplx z) {
  const cplx q = std::exp(pi * I * tau);
  const cplx w = std::exp(2.0 * pi * I * z);
  cplx p = 1.0;
  for (int m = 1; m < 60; ++m) {
    const cplx q2m1 = std::pow(q, 2 * m - 1);
    p *= (1.0 - std::pow(q, 2 * m)) * (1.0 + q2m1 * w) * (1.0 + q2m1 / w);
  }
  return p;
}

std::vector<cplx> random_z(kf::Rng& rng, int g) {
  std::vector<cplx> z;
  for (int k = 0; k < g; ++k) z.emplace_back(rng.uniform(-1, 1), rng.uniform(-0.8, 0.8));
  return z;
}

void check_same_type(const T::ThetaType& a, const T::ThetaType& b) {
  REQUIRE(a.L.size() == b.L.size());
  for (std::size_t k = 0; k < a.L.size(); ++k) {
    CHECK(std::abs(a.J[k] - b.J[k]) < 1e-15);
    for (std::size_t c = 0; c < a.L[k].size(); ++c) CHECK(std::abs(a.L[k][c] - b.L[k][c]) < 1e-15);
  }
}

}  // namespace

TEST_CASE("theta series values") {
  const auto spec = T::make_spec(tau1(I));
  const cplx half = 0.5;
  const auto v = T::eval_riemann_theta(spec, std::span(&half, 1));
  CHECK(std::abs(v.value - direct_sum(I, 0.5)) < 1e-14);
  CHECK(v.tail_bound < 1e-100);

  kf::Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const cplx tau{rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5)};
    const cplx z{rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)};
    const auto s = T::make_spec(tau1(tau));
    const cplx got = T::eval_riemann_theta(s, std::span(&z, 1)).value;
    CHECK(std::abs(got - triple_product(tau, z)) < 1e-12 * std::max(1.0, std::abs(got)));
    const auto c = T::make_spec(tau1(tau), {0.25}, {1.0 / 3.0});
    CHECK(std::abs(T::eval_riemann_theta(c, std::span(&z, 1)).value - direct_sum(tau, z, 0.25, 1.0 / 3.0)) < 1e-12);
  }
}

TEST_CASE("evenness and the odd zero") {
  kf::Rng rng(22);
  const auto spec = T::make_spec(tau2(I, 0.2 + 0.1 * I, 1.5 * I));
  for (int t = 0; t < 20; ++t) {
    auto z = random_z(rng, 2);
    const cplx a = T::eval_riemann_theta(spec, z).value;
    for (auto& c : z) c = -c;
    CHECK(std::abs(T::eval_riemann_theta(spec, z).value - a) < 1e-12 * std::max(1.0, std::abs(a)));
  }
  const auto one = T::make_spec(tau1(I));
  const cplx zero = (1.0 + I) / 2.0;
  CHECK(std::abs(T::eval_riemann_theta(one, std::span(&zero, 1)).value) < 1e-10);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(T::make_spec(tau1(1.0)), kf::InputError);
  CHECK_THROWS_AS(T::make_spec(tau1(-I)), kf::InputError);
  CHECK_THROWS_AS(T::make_spec(tau2(I, 1.1 * I, I)), kf::InputError);
  CMatrix skew = tau2(I, 0.1, I);
  skew(0, 1) = 0.2;
  CHECK_THROWS_AS(T::make_spec(skew), kf::InputError);
  CHECK_THROWS_AS(T::make_spec(tau1(I), {0.5, 0.5}), kf::InputError);
}

TEST_CASE("quasi-periodicity") {
  kf::Rng rng(23);
  const std::vector<T::RiemannThetaSpec> specs{
      T::make_spec(tau1(I)),
      T::make_spec(tau2(I, 0.0, 2.0 * I)),
      T::make_spec(tau2(1.1 * I, 0.2 + 0.3 * I, 0.9 * I), {0.5, 0.0}, {0.0, 0.5}),
  };
  for (const auto& spec : specs) {
    const int g = spec.genus();
    for (int t = 0; t < 20; ++t) {
      const auto z = random_z(rng, g);
      for (int k = 0; k < 2 * g; ++k) CHECK(T::quasi_periodicity_residual(spec, z, k) < 1e-8);
    }
  }
  // At the zero the floor keeps the ratio meaningful.
  const cplx zero = (1.0 + I) / 2.0;
  for (int k = 0; k < 2; ++k) CHECK(T::quasi_periodicity_residual(specs[0], std::span(&zero, 1), k) < 1e-8);

  SUBCASE("truncation") {
    const auto z = random_z(rng, 2);
    for (int k = 0; k < 4; ++k) {
      CHECK(T::quasi_periodicity_residual(specs[1], z, k, 40) <= T::quasi_periodicity_residual(specs[1], z, k, 20) + 1e-12);
      if (k >= 2) CHECK(T::quasi_periodicity_residual(specs[1], z, k, 1) > 1e-8);
    }
  }
}

TEST_CASE("multiplicativity and the type group") {
  kf::Rng rng(24);
  const CMatrix tau = tau2(I, 0.1 + 0.05 * I, 1.3 * I);
  const auto a = T::make_spec(tau), b = T::make_spec(tau, {0.5, 0.5}, {0.5, 0.5}),
             c = T::make_spec(tau, {0.25, 0.0}, {0.0, 0.75});
  for (int t = 0; t < 10; ++t) {
    const auto z = random_z(rng, 2);
    for (int k = 0; k < 4; ++k) CHECK(T::multiplicativity_residual(a, b, z, k) < 1e-7);
  }

  const auto ta = T::riemann_type_of(a), tb = T::riemann_type_of(b), tc = T::riemann_type_of(c);
  check_same_type(T::multiply_types(ta, T::trivial_type(ta.lattice)), ta);
  check_same_type(T::multiply_types(ta, tb), T::multiply_types(tb, ta));
  check_same_type(T::multiply_types(T::multiply_types(ta, tb), tc), T::multiply_types(ta, T::multiply_types(tb, tc)));

  const auto other = T::riemann_type_of(T::make_spec(tau2(I, 0.0, I)));
  CHECK_THROWS_AS(T::multiply_types(ta, other), kf::InputError);
}

TEST_CASE("factor of automorphy along lattice words") {
  kf::Rng rng(25);
  const CMatrix tau = tau2(1.2 * I, 0.3 + 0.2 * I, 0.8 * I);
  const auto spec = T::make_spec(tau, {0.5, 0.0}, {0.25, 0.5});
  const auto type = T::riemann_type_of(spec);
  for (int t = 0; t < 10; ++t) {
    const auto x = random_z(rng, 2);
    std::vector<int> steps(4);
    for (auto& s : steps) s = static_cast<int>(rng.next() % 5) - 2;
    auto shifted = x;
    for (int r = 0; r < 2; ++r) shifted[r] += static_cast<double>(steps[r]);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) shifted[r] += tau(r, c) * static_cast<double>(steps[2 + c]);
    const cplx h0 = T::eval_riemann_theta(spec, x).value;
    const cplx h1 = T::eval_riemann_theta(spec, shifted).value;
    const cplx predicted = std::exp(2.0 * pi * I * T::factor_exponent(type, steps, x)) * h0;
    CHECK(std::abs(h1 - predicted) < 1e-9 * std::max(std::abs(h1), 1e-3));
  }
}

TEST_CASE("level-s space dimension") {
  CHECK(T::level_space_dimension(tau1(I), 1, 16).dimension == 1);
  CHECK(T::level_space_dimension(tau1(I), 2, 16).dimension == 2);
  CHECK(T::level_space_dimension(tau1(0.2 + 1.1 * I), 3, 24).dimension == 3);
  CHECK(T::level_space_dimension(tau1(I), 4, 32).dimension == 4);
  const auto two = T::level_space_dimension(tau2(I, 0.0, 2.0 * I), 2, 32);
  CHECK(two.dimension == 4);
  CHECK(two.ranks == std::vector<int>{4, 4, 4});
  // Clear gap after the rank.
  REQUIRE(two.singular_values.size() > 4);
  CHECK(two.singular_values[3] > 1e-6);
  CHECK(two.singular_values[4] < 1e-10);
  CHECK(T::level_space_dimension(tau2(1.1 * I, 0.2 + 0.3 * I, 0.9 * I), 3, 72).dimension == 9);

  CHECK_THROWS_AS(T::level_space_dimension(tau1(I), 0, 16), kf::InputError);
  CHECK_THROWS_AS(T::level_space_dimension(tau1(I), 5, 100), kf::InputError);
  CHECK_THROWS_AS(T::level_space_dimension(tau1(I), 2, 4), kf::InputError);
  CMatrix big = CMatrix::Identity(3, 3) * I;
  CHECK_THROWS_AS(T::level_space_dimension(big, 2, 100), kf::InputError);
}
