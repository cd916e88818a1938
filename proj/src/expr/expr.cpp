#include "kf/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace kf::expr {
namespace {

Expr make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

Expr unary(Kind kind, Expr arg) {
  Node n;
  n.kind = kind;
  n.children.push_back(std::move(arg));
  return make(std::move(n));
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::constant:
      return x.value == y.value;
    case Kind::var:
    case Kind::conj_var:
      return x.index == y.index;
    case Kind::power:
      if (x.exponent != y.exponent) return false;
      break;
    case Kind::sum:
      if (x.negated != y.negated) return false;
      break;
    default:
      break;
  }
  return std::ranges::equal(x.children, y.children);
}

Expr constant(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw std::invalid_argument("expr::constant: value must be finite and non-negative");
  Node n;
  n.kind = Kind::constant;
  n.value = value;
  return make(std::move(n));
}

Expr z(int index) {
  if (index < 0) throw std::invalid_argument("expr::z: negative index");
  Node n;
  n.kind = Kind::var;
  n.index = index;
  return make(std::move(n));
}

Expr zbar(int index) {
  if (index < 0) throw std::invalid_argument("expr::zbar: negative index");
  Node n;
  n.kind = Kind::conj_var;
  n.index = index;
  return make(std::move(n));
}

Expr sum(std::vector<SignedTerm> terms) {
  if (terms.size() < 2) throw std::invalid_argument("expr::sum: needs at least two terms");
  if (terms.front().negated) throw std::invalid_argument("expr::sum: leading term cannot be negated");
  Node n;
  n.kind = Kind::sum;
  for (auto& t : terms) {
    n.children.push_back(std::move(t.term));
    n.negated.push_back(t.negated);
  }
  return make(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  if (factors.size() < 2) throw std::invalid_argument("expr::product: needs at least two factors");
  Node n;
  n.kind = Kind::product;
  n.children = std::move(factors);
  return make(std::move(n));
}

Expr power(Expr base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("expr::power: negative exponent");
  Node n;
  n.kind = Kind::power;
  n.exponent = exponent;
  n.children.push_back(std::move(base));
  return make(std::move(n));
}

Expr exp(Expr arg) { return unary(Kind::exp, std::move(arg)); }
Expr log(Expr arg) { return unary(Kind::log, std::move(arg)); }
Expr re(Expr arg) { return unary(Kind::re, std::move(arg)); }
Expr im(Expr arg) { return unary(Kind::im, std::move(arg)); }

Expr operator+(Expr a, Expr b) { return sum({{std::move(a), false}, {std::move(b), false}}); }
Expr operator-(Expr a, Expr b) { return sum({{std::move(a), false}, {std::move(b), true}}); }
Expr operator*(Expr a, Expr b) { return product({std::move(a), std::move(b)}); }

int required_dim(const Expr& e) {
  switch (e.kind()) {
    case Kind::var:
    case Kind::conj_var:
      return e.index() + 1;
    case Kind::constant:
      return 0;
    default:
      break;
  }
  int d = 0;
  for (const auto& c : e.children()) d = std::max(d, required_dim(c));
  return d;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Kind k) {
  switch (k) {
    case Kind::sum:
      return 1;
    case Kind::product:
      return 2;
    case Kind::power:
      return 3;
    default:
      return 4;
  }
}

void print_number(double v, std::string& out) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void print_into(const Expr& e, std::string& out);

// Children at or below `level` are parenthesized so that re-parsing yields the
// same tree shape.
void print_child(const Expr& c, int level, std::string& out) {
  if (precedence(c.kind()) <= level) {
    out += '(';
    print_into(c, out);
    out += ')';
  } else {
    print_into(c, out);
  }
}

void print_into(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::constant:
      print_number(e.value(), out);
      return;
    case Kind::var:
      out += 'z';
      out += std::to_string(e.index() + 1);
      return;
    case Kind::conj_var:
      out += "zbar";
      out += std::to_string(e.index() + 1);
      return;
    case Kind::sum: {
      const auto& neg = e.node().negated;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i > 0) out += neg[i] ? " - " : " + ";
        print_child(e.children()[i], 1, out);
      }
      return;
    }
    case Kind::product:
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i > 0) out += '*';
        print_child(e.children()[i], 2, out);
      }
      return;
    case Kind::power:
      print_child(e.child(), 3, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Kind::exp:
    case Kind::log:
    case Kind::re:
    case Kind::im: {
      static constexpr const char* names[] = {"exp(", "log(", "re(", "im("};
      out += names[static_cast<int>(e.kind()) - static_cast<int>(Kind::exp)];
      print_into(e.child(), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    skip_ws();
    if (pos_ == text_.size()) fail("empty potential", pos_, pos_);
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'", pos_, pos_ + 1);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t start, std::size_t end) const {
    end = std::min(end, text_.size());
    start = std::min(start, end);
    throw ParseError("parse error at " + std::to_string(start) + ": " + msg, {start, end});
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

  Expr parse_expr() {
    std::vector<SignedTerm> terms;
    terms.push_back({parse_term(), false});
    while (true) {
      if (peek('+')) {
        ++pos_;
        terms.push_back({parse_term(), false});
      } else if (peek('-')) {
        ++pos_;
        terms.push_back({parse_term(), true});
      } else {
        break;
      }
    }
    if (terms.size() == 1) return std::move(terms.front().term);
    return sum(std::move(terms));
  }

  Expr parse_term() {
    std::vector<Expr> factors;
    factors.push_back(parse_factor());
    while (peek('*')) {
      ++pos_;
      factors.push_back(parse_factor());
    }
    if (factors.size() == 1) return std::move(factors.front());
    return product(std::move(factors));
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (!peek('^')) return base;
    const std::size_t caret = pos_++;
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-')
      fail("negative exponents are not supported", start, start + 1);
    if (pos_ == text_.size() || !is_digit(text_[pos_])) fail("expected integer exponent after '^'", caret, pos_ + 1);
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && (is_digit(text_[end]) || text_[end] == '.')) ++end;
      fail("non-integer exponent", start, end);
    }
    int k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (ec != std::errc{}) fail("exponent out of range", start, pos_);
    return power(std::move(base), k);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ == text_.size()) fail("unexpected end of input", pos_, pos_);
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_++;
      Expr inner = parse_expr();
      if (!peek(')')) fail("unmatched '('", open, open + 1);
      ++pos_;
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_alpha(c)) return parse_word();
    fail("unexpected '" + std::string(1, c) + "'", pos_, pos_ + 1);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        while (p < text_.size() && is_digit(text_[p])) ++p;
        pos_ = p;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(v))
      fail("malformed number", start, pos_);
    if (pos_ < text_.size() && is_alpha(text_[pos_])) fail("missing operator after number", start, pos_ + 1);
    return constant(v);
  }

  Expr parse_word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_alpha(text_[pos_])) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "z" || word == "zbar") return parse_variable(word == "zbar", start);

    Kind kind;
    if (word == "exp")
      kind = Kind::exp;
    else if (word == "log")
      kind = Kind::log;
    else if (word == "re")
      kind = Kind::re;
    else if (word == "im")
      kind = Kind::im;
    else
      fail("unknown identifier '" + std::string(word) + "'", start, pos_);

    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '(' after " + std::string(word), start, pos_ + 1);
    const std::size_t open = pos_++;
    Expr arg = parse_expr();
    if (!peek(')')) fail("unmatched '('", open, open + 1);
    ++pos_;
    return unary(kind, std::move(arg));
  }

  Expr parse_variable(bool conj, std::size_t start) {
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (digits == pos_) fail("expected variable index", start, pos_ + 1);
    long long idx = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, idx);
    if (ec != std::errc{} || idx < 1) fail("variable index must be >= 1", start, pos_);
    if (idx > dim_)
      fail("variable index " + std::to_string(idx) + " exceeds chart dimension " + std::to_string(dim_), start, pos_);
    return conj ? zbar(static_cast<int>(idx - 1)) : z(static_cast<int>(idx - 1));
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

PotentialExpr parse(std::string_view text, int dim) {
  if (dim < 1) throw std::invalid_argument("expr::parse: dimension must be positive");
  return {Parser(text, dim).run(), dim};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

cplx ipow(cplx base, int k) {
  cplx result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

cplx eval(const Expr& e, std::span<const cplx> point) {
  switch (e.kind()) {
    case Kind::constant:
      return e.value();
    case Kind::var:
      return point[e.index()];
    case Kind::conj_var:
      return std::conj(point[e.index()]);
    case Kind::sum: {
      cplx acc = 0.0;
      const auto& neg = e.node().negated;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        const cplx v = eval(e.children()[i], point);
        acc = neg[i] ? acc - v : acc + v;
      }
      return acc;
    }
    case Kind::product: {
      cplx acc = 1.0;
      for (const auto& c : e.children()) acc *= eval(c, point);
      return acc;
    }
    case Kind::power:
      return ipow(eval(e.child(), point), e.exponent());
    case Kind::exp:
      return std::exp(eval(e.child(), point));
    case Kind::log: {
      const cplx v = eval(e.child(), point);
      if (std::abs(v) < log_singularity_floor) throw DomainError("log argument below singularity floor");
      return std::log(v);
    }
    case Kind::re:
      return eval(e.child(), point).real();
    case Kind::im:
      return eval(e.child(), point).imag();
  }
  return 0.0;
}

}  // namespace

cplx eval_point(const Expr& e, std::span<const cplx> point) {
  if (static_cast<int>(point.size()) < required_dim(e))
    throw std::invalid_argument("eval_point: point shorter than expression dimension");
  return eval(e, point);
}

cplx eval_point(const PotentialExpr& p, std::span<const cplx> point) {
  if (static_cast<int>(point.size()) != p.dim) throw std::invalid_argument("eval_point: point length != dim");
  return eval(p.root, point);
}

}  // namespace kf::expr
