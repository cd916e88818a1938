#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "kf/catalog.hpp"
#include "kf/errors.hpp"

namespace kf::catalog {
namespace {

constexpr double coord_tol = 1e-9;
constexpr double matrix_tol = 1e-9;

RMatrix realify(const CMatrix& A) {
  const auto n = A.rows();
  RMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = A.real();
  r.topRightCorner(n, n) = -A.imag();
  r.bottomLeftCorner(n, n) = A.imag();
  r.bottomRightCorner(n, n) = A.real();
  return r;
}

Eigen::VectorXd realify(const std::vector<cplx>& v) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::VectorXd r(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i) = v[i].real();
    r(n + i) = v[i].imag();
  }
  return r;
}

std::vector<cplx> complexify(const Eigen::VectorXd& r) {
  const auto n = r.size() / 2;
  std::vector<cplx> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = {r(i), r(n + i)};
  return v;
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < coord_tol; }

bool all_near_integer(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!near_integer(v(i))) return false;
  return true;
}

bool same_linear(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff() < matrix_tol; }

bool is_identity_matrix(const CMatrix& a, double tol) {
  return (a - CMatrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() < tol;
}

std::vector<cplx> sub(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// Same element of the affine group modulo lattice translations.
bool equivalent(const Lattice& lat, const AffineMap& a, const AffineMap& b) {
  return same_linear(a.A, b.A) && all_near_integer(lattice_coordinates(lat, sub(a.t, b.t)));
}

bool is_identity_element(const Lattice& lat, const AffineMap& g) {
  return is_identity_matrix(g.A, matrix_tol) && all_near_integer(lattice_coordinates(lat, g.t));
}

// Translation reduced into the fundamental parallelepiped.
AffineMap canonical(const Lattice& lat, AffineMap g) {
  Eigen::VectorXd s = lattice_coordinates(lat, g.t);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s(i) -= std::floor(s(i));
    if (s(i) > 1.0 - coord_tol || s(i) < coord_tol) s(i) = 0.0;
  }
  g.t = complexify(lat.real_basis() * s);
  return g;
}

}  // namespace

RMatrix Lattice::real_basis() const {
  RMatrix b(2 * dim, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = realify(generators[j]);
  return b;
}

void Lattice::validate() const {
  if (dim < 1) throw InputError("lattice dimension must be positive");
  if (static_cast<int>(generators.size()) != 2 * dim)
    throw InputError("lattice needs " + std::to_string(2 * dim) + " generators, got " +
                     std::to_string(generators.size()));
  for (const auto& g : generators)
    if (static_cast<int>(g.size()) != dim) throw InputError("lattice generator has wrong length");
  const RMatrix b = real_basis();
  const double scale = std::pow(b.cwiseAbs().maxCoeff(), 2 * dim);
  if (!(std::abs(b.determinant()) > 1e-12 * std::max(scale, 1e-300)))
    throw InputError("lattice generators are not linearly independent over the reals");
}

Lattice Lattice::product(const std::vector<Lattice>& factors) {
  Lattice out;
  for (const auto& f : factors) out.dim += f.dim;
  int offset = 0;
  for (const auto& f : factors) {
    for (const auto& g : f.generators) {
      std::vector<cplx> v(out.dim);
      for (int i = 0; i < f.dim; ++i) v[offset + i] = g[i];
      out.generators.push_back(std::move(v));
    }
    offset += f.dim;
  }
  return out;
}

Lattice Lattice::elliptic(cplx tau) { return {1, {{1.0}, {tau}}}; }

Lattice Lattice::gaussian(int n) {
  Lattice out{n, {}};
  for (int k = 0; k < n; ++k) {
    std::vector<cplx> v(n);
    v[k] = 1.0;
    out.generators.push_back(v);
    v[k] = cplx{0.0, 1.0};
    out.generators.push_back(v);
  }
  return out;
}

AffineMap AffineMap::identity(int n) { return {CMatrix::Identity(n, n), std::vector<cplx>(n)}; }

std::vector<cplx> AffineMap::apply(const std::vector<cplx>& x) const {
  std::vector<cplx> out(t);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out[i] += A(i, j) * x[j];
  return out;
}

AffineMap AffineMap::compose(const AffineMap& other) const { return {A * other.A, apply(other.t)}; }

Eigen::VectorXd lattice_coordinates(const Lattice& lattice, const std::vector<cplx>& t) {
  return lattice.real_basis().partialPivLu().solve(realify(t));
}

std::optional<IMatrix> lattice_matrix(const Lattice& lattice, const CMatrix& A) {
  const RMatrix b = lattice.real_basis();
  const RMatrix m = b.partialPivLu().solve(realify(A) * b);
  IMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!near_integer(m(i, j))) return std::nullopt;
      out(i, j) = std::llround(m(i, j));
    }
  return out;
}

GroupAction generate_group(const Lattice& lattice, const std::vector<AffineMap>& generators, std::string name,
                           std::size_t max_elements) {
  lattice.validate();
  GroupAction out{lattice, {canonical(lattice, AffineMap::identity(lattice.dim))}, std::move(name)};
  auto insert = [&](const AffineMap& g) {
    for (const auto& h : out.elements)
      if (equivalent(lattice, g, h)) return false;
    out.elements.push_back(canonical(lattice, g));
    return true;
  };
  for (const auto& g : generators) insert(g);
  bool grew = true;
  while (grew && out.elements.size() < max_elements) {
    grew = false;
    const std::size_t count = out.elements.size();
    for (std::size_t i = 0; i < count && out.elements.size() < max_elements; ++i)
      for (std::size_t j = 0; j < count && out.elements.size() < max_elements; ++j)
        grew |= insert(out.elements[i].compose(out.elements[j]));
  }
  return out;
}

GroupReport validate_group(const GroupAction& action) {
  const Lattice& lat = action.lattice;
  lat.validate();
  const auto& els = action.elements;
  GroupReport r;

  r.identity_present = std::ranges::any_of(els, [&](const AffineMap& g) { return is_identity_element(lat, g); });

  r.lattice_stable = std::ranges::all_of(els, [&](const AffineMap& g) { return lattice_matrix(lat, g.A).has_value(); });

  auto find = [&](const AffineMap& g) {
    return std::ranges::any_of(els, [&](const AffineMap& h) { return equivalent(lat, g, h); });
  };
  r.closure = true;
  for (const auto& a : els)
    for (const auto& b : els)
      if (!find(a.compose(b))) r.closure = false;

  r.inverses = std::ranges::all_of(els, [&](const AffineMap& a) {
    return std::ranges::any_of(els, [&](const AffineMap& b) { return is_identity_element(lat, a.compose(b)); });
  });

  // Linear parts of finite order. 120 exceeds every finite element order in
  // GL(6, Z).
  r.finite = std::ranges::all_of(els, [&](const AffineMap& g) {
    CMatrix p = g.A;
    for (int k = 1; k <= 120; ++k) {
      if (is_identity_matrix(p, matrix_tol)) return true;
      p = p * g.A;
    }
    return false;
  });

  r.faithful = true;
  for (std::size_t i = 0; i < els.size(); ++i)
    for (std::size_t j = i + 1; j < els.size(); ++j)
      if (equivalent(lat, els[i], els[j])) r.faithful = false;
  return r;
}

SmithForm smith_normal_form(const IMatrix& A) {
  const Eigen::Index m = A.rows(), n = A.cols();
  SmithForm s{IMatrix::Identity(m, m), A, IMatrix::Identity(n, n)};
  IMatrix& D = s.D;
  const Eigen::Index steps = std::min(m, n);

  for (Eigen::Index t = 0; t < steps; ++t) {
    while (true) {
      // Pivot: smallest non-zero magnitude in the trailing block.
      Eigen::Index pi = -1, pj = -1;
      long long best = 0;
      for (Eigen::Index i = t; i < m; ++i)
        for (Eigen::Index j = t; j < n; ++j)
          if (D(i, j) != 0 && (pi < 0 || std::llabs(D(i, j)) < best)) {
            best = std::llabs(D(i, j));
            pi = i;
            pj = j;
          }
      if (pi < 0) return s;  // trailing block is zero
      if (pi != t) {
        D.row(t).swap(D.row(pi));
        s.U.row(t).swap(s.U.row(pi));
      }
      if (pj != t) {
        D.col(t).swap(D.col(pj));
        s.V.col(t).swap(s.V.col(pj));
      }

      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        const long long q = D(i, t) / D(t, t);
        if (q != 0) {
          D.row(i) -= q * D.row(t);
          s.U.row(i) -= q * s.U.row(t);
        }
        if (D(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        const long long q = D(t, j) / D(t, t);
        if (q != 0) {
          D.col(j) -= q * D.col(t);
          s.V.col(j) -= q * s.V.col(t);
        }
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility d_t | every trailing entry; otherwise fold the offending
      // row in and reduce again.
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < m && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      D.row(t) += D.row(bad);
      s.U.row(t) += s.U.row(bad);
    }
    if (D(t, t) < 0) {
      D.row(t) *= -1;
      s.U.row(t) *= -1;
    }
  }
  return s;
}

FreenessResult is_free(const GroupAction& action) {
  const Lattice& lat = action.lattice;
  lat.validate();
  const RMatrix basis = lat.real_basis();
  const Eigen::Index dim = 2 * lat.dim;

  for (std::size_t e = 0; e < action.elements.size(); ++e) {
    const AffineMap& g = action.elements[e];
    if (is_identity_element(lat, g)) continue;
    const auto M = lattice_matrix(lat, g.A);
    if (!M) throw InputError("group element " + std::to_string(e) + " does not preserve the lattice");

    // Fixed point: (M - I) u + s in Z^{2n} for some real u.
    const IMatrix N = *M - IMatrix::Identity(dim, dim);
    const SmithForm snf = smith_normal_form(N);
    const Eigen::VectorXd s = lattice_coordinates(lat, g.t);
    const Eigen::VectorXd y = snf.U.cast<double>() * s;

    bool solvable = true;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const long long d = snf.D(i, i);
      if (d == 0) {
        if (!near_integer(y(i))) {
          solvable = false;
          break;
        }
      } else {
        w(i) = -y(i) / static_cast<double>(d);
      }
    }
    if (!solvable) continue;

    const Eigen::VectorXd u = snf.V.cast<double>() * w;
    return {false, e, complexify(basis * u)};
  }
  return {};
}

bool contains_translations(const GroupAction& action) {
  return std::ranges::any_of(action.elements, [&](const AffineMap& g) {
    return is_identity_matrix(g.A, 1e-12) && !is_identity_element(action.lattice, g);
  });
}

}  // namespace kf::catalog
