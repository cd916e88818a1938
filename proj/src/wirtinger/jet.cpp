#include "kf/wirtinger.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "kf/errors.hpp"

namespace kf::wirtinger {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// All exponent vectors of `nvars` variables with total degree `deg`, in
// lexicographically decreasing order of the first exponent.
void enumerate_degree(int nvars, int deg, std::vector<std::uint8_t>& cur, int var,
                      std::vector<std::uint8_t>& out) {
  if (var == nvars - 1) {
    cur[var] = static_cast<std::uint8_t>(deg);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[var] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, deg - e, cur, var + 1, out);
  }
}

}  // namespace

int MultiIndexPair::total() const noexcept {
  return std::accumulate(alpha.begin(), alpha.end(), 0) + std::accumulate(beta.begin(), beta.end(), 0);
}

JetLayout::JetLayout(int dim) : dim_(dim) {
  if (dim < 1 || dim > 12) throw std::invalid_argument("JetLayout: dimension must be in [1, 12]");
  const int nvars = 2 * dim;
  std::vector<std::uint8_t> cur(nvars, 0);
  for (int d = 0; d <= jet_order; ++d) enumerate_degree(nvars, d, cur, 0, exps_);

  const std::size_t count = exps_.size() / nvars;
  degree_.resize(count);
  weight_.resize(count);
  lookup_.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    std::span<const std::uint8_t> e(exps_.data() + m * nvars, nvars);
    int deg = 0;
    double w = 1.0;
    for (auto x : e) {
      deg += x;
      w *= factorial(x);
    }
    degree_[m] = deg;
    weight_[m] = w;
    lookup_.emplace_back(key(e), m);
  }
  std::ranges::sort(lookup_);

  auto find = [&](std::span<const std::uint8_t> e) {
    auto it = std::ranges::lower_bound(lookup_, std::pair{key(e), std::size_t{0}});
    return it->second;
  };

  conj_.resize(count);
  std::vector<std::uint8_t> tmp(nvars);
  for (std::size_t m = 0; m < count; ++m) {
    for (int v = 0; v < dim; ++v) {
      tmp[v] = exps_[m * nvars + dim + v];
      tmp[dim + v] = exps_[m * nvars + v];
    }
    conj_[m] = find(tmp);
  }

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (degree_[i] + degree_[j] > jet_order) continue;
      for (int v = 0; v < nvars; ++v) tmp[v] = exps_[i * nvars + v] + exps_[j * nvars + v];
      pairs[find(tmp)].emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  offsets_.reserve(count + 1);
  offsets_.push_back(0);
  for (const auto& list : pairs) {
    for (auto [i, j] : list) {
      lhs_.push_back(i);
      rhs_.push_back(j);
    }
    offsets_.push_back(static_cast<std::uint32_t>(lhs_.size()));
  }
}

std::uint64_t JetLayout::key(std::span<const std::uint8_t> e) const noexcept {
  std::uint64_t k = 0;
  for (auto x : e) k = k * (jet_order + 1) + x;
  return k;
}

std::size_t JetLayout::index_of(std::span<const int> alpha, std::span<const int> beta) const noexcept {
  if (static_cast<int>(alpha.size()) != dim_ || static_cast<int>(beta.size()) != dim_) return npos;
  std::vector<std::uint8_t> e(2 * dim_);
  int deg = 0;
  for (int v = 0; v < dim_; ++v) {
    if (alpha[v] < 0 || beta[v] < 0) return npos;
    deg += alpha[v] + beta[v];
    if (deg > jet_order) return npos;
    e[v] = static_cast<std::uint8_t>(alpha[v]);
    e[dim_ + v] = static_cast<std::uint8_t>(beta[v]);
  }
  auto it = std::ranges::lower_bound(lookup_, std::pair{key(e), std::size_t{0}});
  return it->second;
}

std::shared_ptr<const JetLayout> JetLayout::for_dim(int dim) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[dim];
  if (!slot) slot = std::make_shared<const JetLayout>(dim);
  return slot;
}

// ---------------------------------------------------------------------------

Jet::Jet(int dim) : layout_(JetLayout::for_dim(dim)), coeffs_(layout_->size()) {}

Jet::Jet(std::shared_ptr<const JetLayout> layout, std::vector<cplx> coeffs)
    : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != layout_->size()) throw std::invalid_argument("Jet: coefficient count mismatch");
}

Jet Jet::constant(int dim, cplx c) {
  Jet j(dim);
  j.coeffs_[0] = c;
  return j;
}

cplx Jet::coeff(const MultiIndexPair& idx) const {
  const std::size_t m = layout_->index_of(idx.alpha, idx.beta);
  if (m == JetLayout::npos) throw std::out_of_range("Jet::coeff: multi-index outside the order-4 simplex");
  return coeffs_[m];
}

Jet Jet::conj() const {
  Jet out(layout_, std::vector<cplx>(coeffs_.size()));
  for (std::size_t m = 0; m < coeffs_.size(); ++m) out.coeffs_[layout_->conjugate_index(m)] = std::conj(coeffs_[m]);
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += o.coeffs_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= o.coeffs_[m];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.layout_ != b.layout_) throw std::invalid_argument("Jet product: dimension mismatch");
  Jet out(a.layout_, std::vector<cplx>(a.coeffs_.size()));
  kernels::series_product(a.layout_->product_table(), a.coeffs_, b.coeffs_, out.coeffs_);
  return out;
}

namespace {

// sum_{k=0}^{4} w[k] * N^k for the nilpotent part N of x.
Jet compose_nilpotent(const Jet& x, const cplx (&w)[jet_order + 1]) {
  Jet nil = x;
  nil -= Jet::constant(x.dim(), x.value());
  Jet out = Jet::constant(x.dim(), w[0]);
  Jet term = nil;
  for (int k = 1; k <= jet_order; ++k) {
    out += term * w[k];
    if (k < jet_order) term = term * nil;
  }
  return out;
}

}  // namespace

Jet exp(const Jet& x) {
  const cplx e = std::exp(x.value());
  const cplx w[] = {e, e, e / 2.0, e / 6.0, e / 24.0};
  return compose_nilpotent(x, w);
}

Jet log(const Jet& x) {
  const cplx c = x.value();
  if (std::abs(c) < expr::log_singularity_floor) throw DomainError("log argument below singularity floor");
  const cplx r = 1.0 / c;
  const cplx w[] = {std::log(c), r, -r * r / 2.0, r * r * r / 3.0, -r * r * r * r / 4.0};
  return compose_nilpotent(x, w);
}

Jet pow(const Jet& x, int k) {
  if (k < 0) throw std::invalid_argument("Jet pow: negative exponent");
  Jet result = Jet::constant(x.dim(), 1.0);
  Jet base = x;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Jet re(const Jet& x) { return (x + x.conj()) * cplx{0.5, 0.0}; }
Jet im(const Jet& x) { return (x - x.conj()) * cplx{0.0, -0.5}; }

std::vector<Jet> seed(std::span<const cplx> point, int order) {
  if (order != jet_order) throw std::invalid_argument("seed: only order 4 jets are supported");
  const int n = static_cast<int>(point.size());
  if (n < 1) throw std::invalid_argument("seed: empty point");
  auto layout = JetLayout::for_dim(n);
  std::vector<Jet> out;
  out.reserve(2 * n);
  std::vector<int> alpha(n, 0), beta(n, 0);
  for (int side = 0; side < 2; ++side) {
    for (int a = 0; a < n; ++a) {
      std::vector<cplx> c(layout->size());
      c[0] = side == 0 ? point[a] : std::conj(point[a]);
      (side == 0 ? alpha : beta)[a] = 1;
      c[layout->index_of(alpha, beta)] = 1.0;
      (side == 0 ? alpha : beta)[a] = 0;
      out.emplace_back(layout, std::move(c));
    }
  }
  return out;
}

namespace {

Jet eval(const expr::Expr& e, const std::vector<Jet>& vars, int dim) {
  using expr::Kind;
  switch (e.kind()) {
    case Kind::constant:
      return Jet::constant(dim, e.value());
    case Kind::var:
      return vars[e.index()];
    case Kind::conj_var:
      return vars[dim + e.index()];
    case Kind::sum: {
      const auto& neg = e.node().negated;
      Jet acc = eval(e.children()[0], vars, dim);
      for (std::size_t i = 1; i < e.children().size(); ++i) {
        if (neg[i])
          acc -= eval(e.children()[i], vars, dim);
        else
          acc += eval(e.children()[i], vars, dim);
      }
      return acc;
    }
    case Kind::product: {
      Jet acc = eval(e.children()[0], vars, dim);
      for (std::size_t i = 1; i < e.children().size(); ++i) acc = acc * eval(e.children()[i], vars, dim);
      return acc;
    }
    case Kind::power:
      return pow(eval(e.child(), vars, dim), e.exponent());
    case Kind::exp:
      return exp(eval(e.child(), vars, dim));
    case Kind::log:
      return log(eval(e.child(), vars, dim));
    case Kind::re:
      return re(eval(e.child(), vars, dim));
    case Kind::im:
      return im(eval(e.child(), vars, dim));
  }
  return Jet(dim);
}

}  // namespace

Jet jet_eval(const expr::Expr& e, std::span<const cplx> point) {
  const int dim = static_cast<int>(point.size());
  if (expr::required_dim(e) > dim) throw std::invalid_argument("jet_eval: expression references a missing variable");
  return eval(e, seed(point), dim);
}

Jet jet_eval(const expr::PotentialExpr& phi, std::span<const cplx> point) {
  if (static_cast<int>(point.size()) != phi.dim) throw std::invalid_argument("jet_eval: point length != dim");
  return jet_eval(phi.root, point);
}

cplx partial(const Jet& jet, std::span<const int> alpha, std::span<const int> beta) {
  const std::size_t m = jet.layout().index_of(alpha, beta);
  if (m == JetLayout::npos) throw std::out_of_range("partial: multi-index outside the order-4 simplex");
  return jet.coeffs()[m] * jet.layout().factorial_weight(m);
}

cplx partial(const Jet& jet, const MultiIndexPair& idx) { return partial(jet, idx.alpha, idx.beta); }

}  // namespace kf::wirtinger
