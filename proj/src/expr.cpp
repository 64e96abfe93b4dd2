#include "pseudoherm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

namespace detail {
struct Node {
  Expr::Kind kind = Expr::Kind::Constant;
  cplx value{};
  int exponent = 0;
  Func func = Func::Exp;
  Expr a;
  Expr b;
};
}  // namespace detail

using detail::Node;

// ---------------------------------------------------------------------------
// Expr construction

// A null node is the constant 0; Node itself holds Expr children, so the
// default constructor must not allocate.
Expr::Expr() = default;

Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expr Expr::constant(cplx value) {
  Node n;
  n.kind = Kind::Constant;
  n.value = value;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::variable() {
  Node n;
  n.kind = Kind::Variable;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::apply(Func f, Expr arg) {
  Node n;
  n.kind = Kind::Apply;
  n.func = f;
  n.a = std::move(arg);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::pow(Expr base, int exponent) {
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.a = std::move(base);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_ ? node_->kind : Kind::Constant; }
cplx Expr::value() const { return node_ ? node_->value : cplx{}; }
int Expr::exponent() const { return node_->exponent; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
const Expr& Expr::operand() const { return node_->a; }

Expr Expr::binary(Kind kind, Expr a, Expr b) {
  Node n;
  n.kind = kind;
  n.a = std::move(a);
  n.b = std::move(b);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::negation(Expr a) {
  Node n;
  n.kind = Kind::Neg;
  n.a = std::move(a);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

namespace {

Expr raw_binary(Expr::Kind kind, Expr a, Expr b) {
  return Expr::binary(kind, std::move(a), std::move(b));
}
Expr raw_neg(Expr a) { return Expr::negation(std::move(a)); }

}  // namespace

// The arithmetic operators fold constants and drop neutral elements so that
// derivative trees stay readable. The parser builds raw nodes instead.
Expr operator+(Expr a, Expr b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() + b.value());
  if (a.is_constant() && a.value() == cplx{}) return b;
  if (b.is_constant() && b.value() == cplx{}) return a;
  return raw_binary(Expr::Kind::Add, std::move(a), std::move(b));
}

Expr operator-(Expr a, Expr b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() - b.value());
  if (b.is_constant() && b.value() == cplx{}) return a;
  if (a.is_constant() && a.value() == cplx{}) return -std::move(b);
  return raw_binary(Expr::Kind::Sub, std::move(a), std::move(b));
}

Expr operator*(Expr a, Expr b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() * b.value());
  if ((a.is_constant() && a.value() == cplx{}) ||
      (b.is_constant() && b.value() == cplx{}))
    return Expr::constant(0.0);
  if (a.is_constant() && a.value() == cplx{1.0}) return b;
  if (b.is_constant() && b.value() == cplx{1.0}) return a;
  return raw_binary(Expr::Kind::Mul, std::move(a), std::move(b));
}

Expr operator/(Expr a, Expr b) {
  if (b.is_constant() && b.value() == cplx{1.0}) return a;
  if (a.is_constant() && a.value() == cplx{} && !b.is_constant())
    return Expr::constant(0.0);
  return raw_binary(Expr::Kind::Div, std::move(a), std::move(b));
}

Expr operator-(Expr a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::Neg) return a.operand();
  return raw_neg(std::move(a));
}

// ---------------------------------------------------------------------------
// Tokenizer

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < src.size()) {
    const char c = src[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (pos < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[pos])) ||
              src[pos] == '.'))
        ++pos;
      // exponent part: e, E followed by optional sign and at least one digit
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        std::size_t q = pos + 1;
        if (q < src.size() && (src[q] == '+' || src[q] == '-')) ++q;
        if (q < src.size() && std::isdigit(static_cast<unsigned char>(src[q]))) {
          while (q < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[q])))
            ++q;
          pos = q;
        }
      }
      out.push_back({Token::Kind::Number,
                     std::string(src.substr(start, pos - start)), start});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) ||
              src[pos] == '_'))
        ++pos;
      out.push_back({Token::Kind::Identifier,
                     std::string(src.substr(start, pos - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      ++pos;
      out.push_back({Token::Kind::Operator, std::string(1, c), start});
    } else if (c == '(' || c == ')') {
      ++pos;
      out.push_back({Token::Kind::Paren, std::string(1, c), start});
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Token::Kind::End, "", src.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  Expr parse_all() {
    if (peek().kind == Token::Kind::End)
      throw ParseError("empty expression", 0);
    Expr e = parse_sum();
    if (peek().kind != Token::Kind::End) {
      if (peek().lexeme == ")")
        throw ParseError("unbalanced ')'", peek().position);
      throw ParseError("unexpected token '" + peek().lexeme + "'",
                       peek().position);
    }
    return e;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  bool accept_op(char op) {
    if (peek().kind == Token::Kind::Operator && peek().lexeme[0] == op) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept_op('+'))
        lhs = raw_binary(Expr::Kind::Add, lhs, parse_product());
      else if (accept_op('-'))
        lhs = raw_binary(Expr::Kind::Sub, lhs, parse_product());
      else
        return lhs;
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept_op('*'))
        lhs = raw_binary(Expr::Kind::Mul, lhs, parse_unary());
      else if (accept_op('/'))
        lhs = raw_binary(Expr::Kind::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  Expr parse_unary() {
    if (accept_op('-')) return raw_neg(parse_unary());
    if (accept_op('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept_op('^')) base = Expr::pow(base, parse_exponent());
    return base;
  }

  int parse_exponent() {
    bool paren = false;
    if (peek().kind == Token::Kind::Paren && peek().lexeme == "(") {
      paren = true;
      ++pos_;
    }
    int sign = 1;
    if (accept_op('-'))
      sign = -1;
    else
      accept_op('+');
    const Token& t = peek();
    if (t.kind != Token::Kind::Number)
      throw ParseError("exponent must be an integer constant", t.position);
    char* end = nullptr;
    const double v = std::strtod(t.lexeme.c_str(), &end);
    if (*end != '\0' || v != std::floor(v) || std::abs(v) > 1024)
      throw ParseError("exponent must be an integer constant", t.position);
    ++pos_;
    if (paren) expect_close();
    return sign * static_cast<int>(v);
  }

  void expect_close() {
    if (peek().kind == Token::Kind::Paren && peek().lexeme == ")") {
      ++pos_;
      return;
    }
    if (peek().kind == Token::Kind::End)
      throw ParseError("unbalanced '(': missing ')'", peek().position);
    throw ParseError("expected ')' but found '" + peek().lexeme + "'",
                     peek().position);
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Number: {
        ++pos_;
        char* end = nullptr;
        const double v = std::strtod(t.lexeme.c_str(), &end);
        if (*end != '\0') throw ParseError("malformed number", t.position);
        return Expr::constant(v);
      }
      case Token::Kind::Identifier:
        return parse_identifier();
      case Token::Kind::Paren:
        if (t.lexeme == "(") {
          ++pos_;
          Expr inner = parse_sum();
          expect_close();
          return inner;
        }
        throw ParseError("unbalanced ')'", t.position);
      case Token::Kind::Operator:
        throw ParseError("dangling operator '" + t.lexeme + "'", t.position);
      case Token::Kind::End:
        throw ParseError("expression ends after an operator", t.position);
    }
    throw ParseError("unexpected token", t.position);
  }

  Expr parse_identifier() {
    const Token t = next();
    if (t.lexeme == "x") return Expr::variable();
    if (t.lexeme == "i") return Expr::constant(cplx{0.0, 1.0});
    if (t.lexeme == "pi") return Expr::constant(std::numbers::pi);

    static const std::pair<const char*, int> table[] = {
        {"sech", -1},
        {"tanh", static_cast<int>(Func::Tanh)},
        {"cosh", static_cast<int>(Func::Cosh)},
        {"sinh", static_cast<int>(Func::Sinh)},
        {"exp", static_cast<int>(Func::Exp)},
        {"sin", static_cast<int>(Func::Sin)},
        {"cos", static_cast<int>(Func::Cos)},
        {"ln", static_cast<int>(Func::Ln)},
        {"sqrt", static_cast<int>(Func::Sqrt)},
    };
    for (const auto& [name, id] : table) {
      if (t.lexeme != name) continue;
      if (!(peek().kind == Token::Kind::Paren && peek().lexeme == "("))
        throw ParseError("expected '(' after " + t.lexeme, peek().position);
      ++pos_;
      Expr arg = parse_sum();
      expect_close();
      // sech is sugar for 1/cosh so derivative rules live in one place.
      if (id < 0)
        return raw_binary(Expr::Kind::Div, Expr::constant(1.0),
                          Expr::apply(Func::Cosh, arg));
      return Expr::apply(static_cast<Func>(id), arg);
    }
    throw ParseError("unknown identifier '" + t.lexeme + "'", t.position);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

cplx divide(cplx num, cplx den, const Expr& where) {
  if (den == cplx{}) throw DomainError("division by zero", print(where));
  if (den.imag() == 0.0) return {num.real() / den.real(), num.imag() / den.real()};
  return num / den;
}

cplx ipow(cplx base, int n, const Expr& where) {
  if (n == 0) return 1.0;
  const bool invert = n < 0;
  unsigned m = static_cast<unsigned>(invert ? -n : n);
  cplx result = 1.0;
  cplx b = base;
  if (base.imag() == 0.0) {
    double r = 1.0, br = base.real();
    while (m) {
      if (m & 1u) r *= br;
      br *= br;
      m >>= 1u;
    }
    result = r;
  } else {
    while (m) {
      if (m & 1u) result *= b;
      b *= b;
      m >>= 1u;
    }
  }
  return invert ? divide(1.0, result, where) : result;
}

cplx apply_func(Func f, cplx z, const Expr& where) {
  // Real arguments use the real library functions; the complex overloads
  // produce NaN for large |x| where the real ones saturate cleanly.
  if (z.imag() == 0.0) {
    const double x = z.real();
    switch (f) {
      case Func::Tanh: return std::tanh(x);
      case Func::Cosh: return std::cosh(x);
      case Func::Sinh: return std::sinh(x);
      case Func::Exp: return std::exp(x);
      case Func::Sin: return std::sin(x);
      case Func::Cos: return std::cos(x);
      case Func::Ln:
        if (x == 0.0) throw DomainError("logarithm of zero", print(where));
        if (x > 0.0) return std::log(x);
        return std::log(z);
      case Func::Sqrt:
        if (x >= 0.0) return std::sqrt(x);
        return {0.0, std::sqrt(-x)};
    }
  }
  switch (f) {
    case Func::Tanh: return std::tanh(z);
    case Func::Cosh: return std::cosh(z);
    case Func::Sinh: return std::sinh(z);
    case Func::Exp: return std::exp(z);
    case Func::Sin: return std::sin(z);
    case Func::Cos: return std::cos(z);
    case Func::Ln: return std::log(z);
    case Func::Sqrt: return std::sqrt(z);
  }
  return {};
}

}  // namespace

cplx eval(const Expr& e, double x) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value();
    case Expr::Kind::Variable: return x;
    case Expr::Kind::Add: return eval(e.lhs(), x) + eval(e.rhs(), x);
    case Expr::Kind::Sub: return eval(e.lhs(), x) - eval(e.rhs(), x);
    case Expr::Kind::Mul: {
      const cplx a = eval(e.lhs(), x), b = eval(e.rhs(), x);
      if (a.imag() == 0.0 && b.imag() == 0.0) return a.real() * b.real();
      return a * b;
    }
    case Expr::Kind::Div: return divide(eval(e.lhs(), x), eval(e.rhs(), x), e);
    case Expr::Kind::Pow: return ipow(eval(e.operand(), x), e.exponent(), e);
    case Expr::Kind::Neg: return -eval(e.operand(), x);
    case Expr::Kind::Apply: return apply_func(e.func(), eval(e.operand(), x), e);
  }
  return {};
}

std::vector<cplx> sample(const Expr& e, std::span<const double> points) {
  std::vector<cplx> out;
  out.reserve(points.size());
  for (double x : points) out.push_back(eval(e, x));
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr derive(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return Expr::constant(0.0);
    case K::Variable: return Expr::constant(1.0);
    case K::Add: return derive(e.lhs()) + derive(e.rhs());
    case K::Sub: return derive(e.lhs()) - derive(e.rhs());
    case K::Mul:
      return derive(e.lhs()) * e.rhs() + e.lhs() * derive(e.rhs());
    case K::Div: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      if (u.is_constant())
        return -(u * derive(v)) / Expr::pow(v, 2);
      return (derive(u) * v - u * derive(v)) / Expr::pow(v, 2);
    }
    case K::Pow: {
      const int n = e.exponent();
      const Expr& u = e.operand();
      if (n == 0) return Expr::constant(0.0);
      if (n == 1) return derive(u);
      const Expr lowered = n == 2 ? u : Expr::pow(u, n - 1);
      return Expr::constant(static_cast<double>(n)) * lowered * derive(u);
    }
    case K::Neg: return -derive(e.operand());
    case K::Apply: {
      const Expr& u = e.operand();
      const Expr du = derive(u);
      switch (e.func()) {
        case Func::Tanh:
          return du * Expr::pow(Expr::apply(Func::Cosh, u), -2);
        case Func::Cosh: return Expr::apply(Func::Sinh, u) * du;
        case Func::Sinh: return Expr::apply(Func::Cosh, u) * du;
        case Func::Exp: return e * du;
        case Func::Sin: return Expr::apply(Func::Cos, u) * du;
        case Func::Cos: return -(Expr::apply(Func::Sin, u) * du);
        case Func::Ln: return du / u;
        case Func::Sqrt: return du / (Expr::constant(2.0) * e);
      }
    }
  }
  return Expr::constant(0.0);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_constant(cplx v) {
  if (v.imag() == 0.0) {
    if (v.real() < 0.0 || std::signbit(v.real()))
      return "(-" + format_real(-v.real()) + ")";
    return format_real(v.real());
  }
  std::string im = format_real(std::abs(v.imag())) + "*i";
  if (v.real() == 0.0)
    return v.imag() < 0.0 ? "(-" + im + ")" : "(" + im + ")";
  std::string re = v.real() < 0.0 ? "-" + format_real(-v.real())
                                  : format_real(v.real());
  return "(" + re + (v.imag() < 0.0 ? "-" : "+") + im + ")";
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Tanh: return "tanh";
    case Func::Cosh: return "cosh";
    case Func::Sinh: return "sinh";
    case Func::Exp: return "exp";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

}  // namespace

std::string print(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return print_constant(e.value());
    case K::Variable: return "x";
    case K::Add: return "(" + print(e.lhs()) + " + " + print(e.rhs()) + ")";
    case K::Sub: return "(" + print(e.lhs()) + " - " + print(e.rhs()) + ")";
    case K::Mul: return "(" + print(e.lhs()) + "*" + print(e.rhs()) + ")";
    case K::Div: return "(" + print(e.lhs()) + "/" + print(e.rhs()) + ")";
    case K::Pow: {
      const int n = e.exponent();
      return "(" + print(e.operand()) + ")^" +
             (n < 0 ? "(" + std::to_string(n) + ")" : std::to_string(n));
    }
    case K::Neg: return "(-" + print(e.operand()) + ")";
    case K::Apply:
      return std::string(func_name(e.func())) + "(" + print(e.operand()) + ")";
  }
  return "";
}

// ---------------------------------------------------------------------------

bool is_odd(const Expr& e, std::span<const double> points, double tol) {
  for (double x : points) {
    const cplx plus = eval(e, x);
    const cplx minus = eval(e, -x);
    if (std::abs(plus + minus) > tol * (1.0 + std::abs(plus))) return false;
  }
  return true;
}

bool is_real_valued(const Expr& e, std::span<const double> points, double tol) {
  for (double x : points) {
    const cplx v = eval(e, x);
    if (std::abs(v.imag()) > tol * (1.0 + std::abs(v))) return false;
  }
  return true;
}

}  // namespace pseudoherm
