#ifndef KF_EXPR_HPP
#define KF_EXPR_HPP

// Expression language for real-valued potentials Phi(z, zbar).
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' integer)?
//   atom   := number | 'z' index | 'zbar' index
//           | 'exp(' expr ')' | 'log(' expr ')' | 're(' expr ')' | 'im(' expr ')'
//           | '(' expr ')'
//
// Indices are 1-based in text and 0-based in the tree. Constants are
// non-negative (the grammar has no unary minus); subtraction lives in Sum
// nodes as a per-term sign.

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kf/errors.hpp"

namespace kf::expr {

using cplx = std::complex<double>;

enum class Kind { constant, var, conj_var, sum, product, power, exp, log, re, im };

class Expr;

struct Node {
  Kind kind{};
  double value = 0.0;   // constant
  int index = 0;        // var / conj_var, 0-based
  int exponent = 0;     // power
  std::vector<Expr> children;
  std::vector<bool> negated;  // sum: sign of each term
};

// Immutable shared handle to a node; cheap to copy, safe to share.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  Kind kind() const noexcept { return node_->kind; }
  const Node& node() const noexcept { return *node_; }
  double value() const noexcept { return node_->value; }
  int index() const noexcept { return node_->index; }
  int exponent() const noexcept { return node_->exponent; }
  std::span<const Expr> children() const noexcept { return node_->children; }
  const Expr& child() const { return node_->children.front(); }

  // Structural equality; constants compare by exact value.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

struct SignedTerm {
  Expr term;
  bool negated = false;
};

Expr constant(double value);
Expr z(int index);
Expr zbar(int index);
Expr sum(std::vector<SignedTerm> terms);
Expr product(std::vector<Expr> factors);
Expr power(Expr base, int exponent);
Expr exp(Expr arg);
Expr log(Expr arg);
Expr re(Expr arg);
Expr im(Expr arg);

// Convenience for the common a + b / a * b shapes.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);

// A potential together with its chart dimension.
struct PotentialExpr {
  Expr root;
  int dim = 1;
};

// Modulus below which log() refuses its argument.
inline constexpr double log_singularity_floor = 1e-300;

PotentialExpr parse(std::string_view text, int dim);

std::string print(const Expr& e);
inline std::string print(const PotentialExpr& p) { return print(p.root); }

// Highest variable index referenced plus one (0 for a constant expression).
int required_dim(const Expr& e);

// Phi at the point, with zbar_a bound to conj(point[a]).
cplx eval_point(const PotentialExpr& p, std::span<const cplx> point);
cplx eval_point(const Expr& e, std::span<const cplx> point);

}  // namespace kf::expr

#endif  // KF_EXPR_HPP
