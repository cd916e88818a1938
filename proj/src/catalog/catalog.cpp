#include <cmath>
#include <numbers>

#include "kf/catalog.hpp"
#include "kf/errors.hpp"

namespace kf::catalog {
namespace {

const cplx I{0.0, 1.0};
const cplx rho = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

AffineMap diag_map(cplx e, cplx f, cplx te, cplx tf) {
  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = e;
  A(1, 1) = f;
  return {A, {te, tf}};
}

// One hyperelliptic family (E x F) / G.
//   rotation: action on F of the cyclic generator, paired with the E-translation 1/order.
//   extra:    optional second generator translating both factors (product groups).
struct Family {
  std::string label;
  std::string holonomy;
  cplx tau;  // E = F = C / (Z + Z tau)
  cplx rotation;
  int order;
  std::optional<std::vector<cplx>> extra;
};

CatalogEntry make_family(const Family& f) {
  const Lattice ef = Lattice::product({Lattice::elliptic(f.tau), Lattice::elliptic(f.tau)});
  const AffineMap g = diag_map(1.0, f.rotation, 1.0 / static_cast<double>(f.order), 0.0);

  CatalogEntry e;
  e.name = "hyperelliptic-" + f.label;
  e.dim = 2;
  e.potential = flat_potential(2);
  e.expected_class = ExpectedClass::hyperelliptic;
  e.group_label = f.label;
  e.holonomy = f.holonomy;
  e.betti = "b1=2, b2=2";
  e.flags = {true, true, true};

  if (!f.extra) {
    e.lattice = ef;
    e.action = generate_group(ef, {g}, e.name);
    return e;
  }

  // The second generator is a pure translation of E x F. Absorbing it into
  // the lattice gives the same quotient with a torsion-free cyclic action.
  const AffineMap h{CMatrix::Identity(2, 2), *f.extra};
  e.covering_action = generate_group(ef, {g, h}, e.name + "-covering");
  Lattice reduced = ef;
  // (tau, 0) is k*h minus F-lattice vectors (k = 2 or 3), so the new basis
  // spans a lattice containing E x F.
  reduced.generators[1] = *f.extra;
  e.lattice = reduced;
  e.action = generate_group(reduced, {g}, e.name);
  return e;
}

CatalogEntry flat_torus(std::string name, int dim, Lattice lattice, std::string betti) {
  CatalogEntry e;
  e.name = std::move(name);
  e.dim = dim;
  e.potential = flat_potential(dim);
  e.action = generate_group(lattice, {}, e.name);
  e.lattice = std::move(lattice);
  e.expected_class = ExpectedClass::torus;
  e.group_label = "1";
  e.holonomy = "1";
  e.betti = std::move(betti);
  e.flags = {true, true, true};
  return e;
}

CatalogEntry metadata_row(std::string name, int dim, ExpectedClass cls, std::string betti, StructureFlags flags,
                          std::string holonomy = "") {
  CatalogEntry e;
  e.name = std::move(name);
  e.dim = dim;
  e.expected_class = cls;
  e.betti = std::move(betti);
  e.flags = flags;
  e.holonomy = std::move(holonomy);
  e.metadata_only = true;
  return e;
}

}  // namespace

std::string_view to_string(ExpectedClass c) {
  switch (c) {
    case ExpectedClass::torus:
      return "torus";
    case ExpectedClass::hyperelliptic:
      return "hyperelliptic";
    case ExpectedClass::negative_control:
      break;
  }
  return "negative-control";
}

std::optional<ExpectedClass> expected_class_from_string(std::string_view s) {
  if (s == "torus") return ExpectedClass::torus;
  if (s == "hyperelliptic") return ExpectedClass::hyperelliptic;
  if (s == "negative-control") return ExpectedClass::negative_control;
  return std::nullopt;
}

HopfVerdict hopf_affine_condition(cplx a, cplx b, cplx c, int m) {
  constexpr double tol = 1e-12;
  HopfVerdict v;
  v.affine = std::abs(c * static_cast<double>(m - 1)) <= tol;
  v.frobenius = false;
  if (m < 1) {
    v.reason = "invalid Hopf data: m must be a positive integer";
    return v;
  }
  const double ma = std::abs(a), mb = std::abs(b);
  if (!(ma > 0.0 && ma <= mb && mb < 1.0)) {
    v.reason = "invalid Hopf data: need 0 < |a| <= |b| < 1";
    return v;
  }
  if (std::abs((a - std::pow(b, m)) * c) > tol) {
    v.reason = "invalid Hopf data: (a - b^m) c != 0";
    return v;
  }
  v.valid = true;
  v.reason = "Hopf surfaces carry no Kähler metric";
  return v;
}

expr::PotentialExpr flat_potential(int dim) {
  std::vector<expr::SignedTerm> terms;
  for (int a = 0; a < dim; ++a) terms.push_back({expr::z(a) * expr::zbar(a), false});
  if (dim == 1) return {terms.front().term, 1};
  return {expr::sum(std::move(terms)), dim};
}

std::vector<CatalogEntry> hyperelliptic_catalog() {
  const std::vector<Family> families{
      {"Z2", "Z2", I, -1.0, 2, std::nullopt},
      {"Z2xZ2", "Z2", I, -1.0, 2, std::vector<cplx>{I / 2.0, 0.5}},
      {"Z4", "Z4", I, I, 4, std::nullopt},
      {"Z4xZ2", "Z4", I, I, 4, std::vector<cplx>{I / 2.0, (1.0 + I) / 2.0}},
      {"Z3", "Z3", rho, rho, 3, std::nullopt},
      {"Z3xZ3", "Z3", rho, rho, 3, std::vector<cplx>{rho / 3.0, (1.0 - rho) / 3.0}},
      {"Z6", "Z6", rho, -rho, 6, std::nullopt},
  };
  std::vector<CatalogEntry> out;
  out.push_back(flat_torus("torus", 2, Lattice::gaussian(2), "b1=4, b2=6"));
  for (const auto& f : families) out.push_back(make_family(f));
  return out;
}

std::vector<CatalogEntry> full_catalog() {
  std::vector<CatalogEntry> out = hyperelliptic_catalog();
  out.push_back(flat_torus("elliptic-curve", 1, Lattice::elliptic(I), "b1=2"));
  out.push_back(flat_torus("abelian-threefold", 3, Lattice::gaussian(3), "b1=6, b2=15, b3=20"));

  // Computational negative control: Fubini–Study chart potential.
  CatalogEntry fs;
  fs.name = "fubini-study-2";
  fs.dim = 2;
  fs.potential = expr::parse("log(1 + z1*zbar1 + z2*zbar2)", 2);
  fs.expected_class = ExpectedClass::negative_control;
  fs.betti = "b1=0, b2=1";
  fs.flags = {false, false, true};
  out.push_back(std::move(fs));

  CatalogEntry hopf = metadata_row("hopf-primary", 2, ExpectedClass::negative_control, "b1=1, b2=0",
                                   {false, true, false});
  hopf.hopf = HopfData{0.5, 0.5, 0.0, 3};
  out.push_back(std::move(hopf));

  out.push_back(metadata_row("inoue-surface", 2, ExpectedClass::negative_control, "b1=1, b2=0", {false, true, false}));
  out.push_back(metadata_row("minimal-elliptic-surface", 2, ExpectedClass::negative_control, "b1 odd",
                             {false, true, false}));
  out.push_back(metadata_row("ruled-surface", 2, ExpectedClass::negative_control, "b1=2g, b2=2", {false, false, true}));
  out.push_back(metadata_row("k3-surface", 2, ExpectedClass::negative_control, "b1=0, b2=22", {false, false, true}));
  out.push_back(metadata_row("hantzsche-wendt-3", 3, ExpectedClass::hyperelliptic, "b1=0", {true, true, true},
                             "Z2xZ2"));
  out.push_back(metadata_row("calabi-yau-flat-3", 3, ExpectedClass::hyperelliptic, "b1=b3=b5=0",
                             {true, true, true}));
  return out;
}

double isometry_check(const CatalogEntry& entry) {
  if (!entry.action) return 0.0;
  double r = 0.0;
  for (const auto& g : entry.action->elements) {
    const auto n = g.A.rows();
    r = std::max(r, kahler::max_abs(g.A.adjoint() * g.A - CMatrix::Identity(n, n)));
  }
  return r;
}

ClassificationCounts classification_counts() {
  return {static_cast<int>(hyperelliptic_catalog().size()), threefold_count};
}

}  // namespace kf::catalog
