#include <cmath>

#include "doctest.h"
#include "kf/catalog.hpp"
#include "kf/errors.hpp"
#include "kf/expr.hpp"
#include "oracles.hpp"

namespace E = kf::expr;
using kf::cplx;

TEST_CASE("smallest potential parses to a product of z and zbar") {
  const auto p = E::parse("z1*zbar1", 1);
  REQUIRE(p.root.kind() == E::Kind::product);
  CHECK(p.root == E::z(0) * E::zbar(0));
  CHECK(E::print(p) == "z1*zbar1");
}

TEST_CASE("Fubini-Study potential parses into a nested tree") {
  const auto p = E::parse("log(1 + z1*zbar1 + z2*zbar2)", 2);
  REQUIRE(p.root.kind() == E::Kind::log);
  const auto& inner = p.root.child();
  REQUIRE(inner.kind() == E::Kind::sum);
  CHECK(inner.children().size() == 3);
  CHECK(inner.children()[2] == E::z(1) * E::zbar(1));
}

TEST_CASE("parse errors carry a source span") {
  SUBCASE("unmatched parenthesis points at the open paren") {
    try {
      E::parse("z1*(zbar1", 1);
      FAIL("expected a parse error");
    } catch (const kf::ParseError& e) {
      CHECK(e.span().start == 3);
      CHECK(e.span().end == 4);
    }
  }
  SUBCASE("index beyond the chart") { CHECK_THROWS_AS(E::parse("z3*zbar1", 2), kf::ParseError); }
  SUBCASE("index zero") { CHECK_THROWS_AS(E::parse("z0", 1), kf::ParseError); }
  SUBCASE("fractional exponent") { CHECK_THROWS_AS(E::parse("z1^1.5", 1), kf::ParseError); }
  SUBCASE("negative exponent") {
    try {
      E::parse("z1^-2", 1);
      FAIL("expected a parse error");
    } catch (const kf::ParseError& e) {
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(E::parse("   ", 1), kf::ParseError); }
  SUBCASE("trailing garbage") { CHECK_THROWS_AS(E::parse("z1 zbar1", 1), kf::ParseError); }
}

TEST_CASE("printer output is canonical") {
  CHECK(E::print(E::constant(1.0) + E::power(E::z(0), 2)) == "1 + z1^2");
  CHECK(E::print(E::parse("  z1 *   zbar1  ", 1)) == "z1*zbar1");
  CHECK(E::print(E::parse("(z1 + z2)*zbar1", 2)) == "(z1 + z2)*zbar1");
  CHECK(E::print(E::parse("1 - (z1 - z2)", 2)) == "1 - (z1 - z2)");
  CHECK(E::print(E::parse("2.5e-3*re(z1^3)", 1)) == "0.0025*re(z1^3)");
}

TEST_CASE("parse after print is the identity on 200 random trees") {
  kf::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next() % 3);
    const auto e = oracle::random_expr(rng, dim, 6);
    const auto text = E::print(e);
    INFO(text);
    CHECK(E::parse(text, dim).root == e);
  }
}

TEST_CASE("evaluation agrees with an independent interpreter") {
  kf::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next() % 3);
    const auto e = oracle::random_expr(rng, dim, 5);
    const auto z = oracle::random_point(rng, dim, 1.0);
    const cplx want = oracle::interpret(e, z);
    if (!std::isfinite(std::abs(want))) continue;
    const cplx got = E::eval_point(e, z);
    INFO(E::print(e));
    CHECK(std::abs(got - want) <= 1e-14 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("point evaluation examples") {
  const std::vector<cplx> z{{2.0, 1.0}};
  CHECK(std::abs(E::eval_point(E::parse("z1*zbar1", 1), z) - 5.0) < 1e-15);
  const std::vector<cplx> zero{0.0};
  CHECK(std::abs(E::eval_point(E::parse("log(1+z1*zbar1)", 1), zero)) < 1e-15);
  const std::vector<cplx> w{{3.0, -4.0}};
  CHECK(std::abs(E::eval_point(E::parse("re(z1)", 1), w) - 3.0) < 1e-15);
  CHECK(std::abs(E::eval_point(E::parse("im(z1)", 1), w) + 4.0) < 1e-15);
}

TEST_CASE("log below the singularity floor is a domain error") {
  const std::vector<cplx> zero{0.0};
  CHECK_THROWS_AS(E::eval_point(E::parse("log(z1*zbar1)", 1), zero), kf::DomainError);
}

TEST_CASE("catalog and generated potentials are real at 100 points") {
  kf::Rng rng(5);
  std::vector<E::PotentialExpr> potentials;
  for (const auto& e : kf::catalog::full_catalog())
    if (e.potential) potentials.push_back(*e.potential);
  for (int k = 0; k < 5; ++k) potentials.push_back(oracle::random_polynomial(rng, 2).expression());
  for (const auto& p : potentials)
    for (int i = 0; i < 100; ++i) {
      const auto z = oracle::random_point(rng, p.dim, 1.0);
      const cplx v = E::eval_point(p, z);
      CHECK(std::abs(v.imag()) < 1e-12 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("required dimension is the largest index used") {
  CHECK(E::required_dim(E::parse("z1 + zbar3", 3).root) == 3);
  CHECK(E::required_dim(E::constant(2.0)) == 0);
}
