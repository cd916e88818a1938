#ifndef KF_CATALOG_HPP
#define KF_CATALOG_HPP

// Classification data for flat Kähler quotients T/G: lattices, finite
// affine actions, freeness and translation tests, and the catalog of
// compact Kähler–Frobenius surfaces with its negative controls.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "kf/expr.hpp"
#include "kf/kahler.hpp"

namespace kf::catalog {

using kahler::CMatrix;
using RMatrix = Eigen::MatrixXd;
using IMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Full-rank lattice in C^n given by 2n generators.
struct Lattice {
  int dim = 0;
  std::vector<std::vector<cplx>> generators;

  // Columns are the generators in real coordinates (Re z_1..Re z_n, Im z_1..Im z_n).
  RMatrix real_basis() const;
  // Throws InputError unless there are 2n real-independent generators.
  void validate() const;

  static Lattice product(const std::vector<Lattice>& factors);
  // C / (Z + Z tau)
  static Lattice elliptic(cplx tau);
  // Z^n + i Z^n
  static Lattice gaussian(int n);
};

struct AffineMap {
  CMatrix A;
  std::vector<cplx> t;

  static AffineMap identity(int n);
  std::vector<cplx> apply(const std::vector<cplx>& x) const;
  // (this o other)(x) = this(other(x))
  AffineMap compose(const AffineMap& other) const;
};

struct GroupAction {
  Lattice lattice;
  std::vector<AffineMap> elements;
  std::string name;
};

// Closes the generators (plus identity) under composition modulo the
// lattice. Stops after max_elements and returns what it has.
GroupAction generate_group(const Lattice& lattice, const std::vector<AffineMap>& generators, std::string name,
                           std::size_t max_elements = 512);

// Integer representation of A on lattice coordinates, when it exists.
std::optional<IMatrix> lattice_matrix(const Lattice& lattice, const CMatrix& A);

// Translation in lattice coordinates.
Eigen::VectorXd lattice_coordinates(const Lattice& lattice, const std::vector<cplx>& t);

struct GroupReport {
  bool identity_present = false;
  bool closure = false;
  bool inverses = false;
  bool lattice_stable = false;
  bool finite = false;
  bool faithful = false;

  bool valid() const noexcept {
    return identity_present && closure && inverses && lattice_stable && finite && faithful;
  }
};

GroupReport validate_group(const GroupAction& action);

struct FreenessResult {
  bool free = true;
  // On failure: the element with a fixed point and the fixed point itself.
  std::optional<std::size_t> element;
  std::vector<cplx> witness;
};

// Decides whether some non-identity element fixes a point of C^n / Lambda.
// Exact over the integers: solvability of (M - I) u + s in Z^{2n} is read off
// the Smith normal form of M - I. Throws InputError if an element does not
// preserve the lattice.
FreenessResult is_free(const GroupAction& action);

// True iff a non-identity element has linear part exactly I.
bool contains_translations(const GroupAction& action);

// Smith normal form: U * A * V = D with U, V unimodular and D diagonal with
// d_1 | d_2 | ... (non-negative).
struct SmithForm {
  IMatrix U, D, V;
};
SmithForm smith_normal_form(const IMatrix& A);

enum class ExpectedClass { torus, hyperelliptic, negative_control };

std::string_view to_string(ExpectedClass c);
std::optional<ExpectedClass> expected_class_from_string(std::string_view s);

struct HopfVerdict {
  bool valid = false;
  bool affine = false;
  bool frobenius = false;
  std::string reason;
};

// (x, y) -> (a x + c y^m, b y) with 0 < |a| <= |b| < 1 and (a - b^m) c = 0.
// Affine structure iff c (m - 1) = 0; never Frobenius (no Kähler metric).
HopfVerdict hopf_affine_condition(cplx a, cplx b, cplx c, int m);

struct HopfData {
  cplx a, b, c;
  int m = 1;
};

// Table flags: (FM) Frobenius manifold, (AS) holomorphic affine structure, (K) Kähler.
struct StructureFlags {
  bool frobenius = false;
  bool affine = false;
  bool kahler = false;
};

struct CatalogEntry {
  std::string name;
  int dim = 0;
  std::optional<expr::PotentialExpr> potential;
  std::optional<Lattice> lattice;
  // Torsion-free action used for the quotient (translations absorbed into
  // the lattice).
  std::optional<GroupAction> action;
  // Product-lattice presentation on E x F with the full family group, when
  // it differs from `action`.
  std::optional<GroupAction> covering_action;
  ExpectedClass expected_class = ExpectedClass::torus;
  std::string group_label;
  std::string holonomy;
  std::string betti;
  StructureFlags flags;
  std::optional<HopfData> hopf;
  bool metadata_only = false;
};

// Flat potential sum_a z_a zbar_a.
expr::PotentialExpr flat_potential(int dim);

// The complex torus plus the seven hyperelliptic families (8 entries).
std::vector<CatalogEntry> hyperelliptic_catalog();

// Surfaces, flat tori in dimensions 1 and 3, the Hopf negative control and
// metadata-only rows.
std::vector<CatalogEntry> full_catalog();

// max over elements of |A^H A - I|; 0 when there is no action.
double isometry_check(const CatalogEntry& entry);

struct ClassificationCounts {
  int surfaces = 0;
  int threefolds = 0;
};

// Surfaces are counted from hyperelliptic_catalog(); the threefold count is
// stored metadata.
ClassificationCounts classification_counts();

inline constexpr int threefold_count = 174;

}  // namespace kf::catalog

#endif  // KF_CATALOG_HPP
