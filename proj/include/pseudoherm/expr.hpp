#pragma once

// Closed-form complex functions of one real variable x.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' integer)*        left associative
//   primary := number | 'x' | 'i' | 'pi' | func '(' sum ')' | '(' sum ')'
//   func    := sech | tanh | cosh | sinh | exp | sin | cos | ln | sqrt
//
// Exponents are integer literals, optionally signed or parenthesized:
// "x^2", "cosh(x)^-1", "x^(-2)".

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pseudoherm {

using cplx = std::complex<double>;

struct Token {
  enum class Kind { Number, Identifier, Operator, Paren, End };
  Kind kind;
  std::string lexeme;
  std::size_t position;
};

/// Splits source text into tokens; whitespace is dropped.
std::vector<Token> tokenize(std::string_view source);

enum class Func { Tanh, Cosh, Sinh, Exp, Sin, Cos, Ln, Sqrt };

namespace detail {
struct Node;
}

/// Immutable expression tree. Copies share structure.
class Expr {
public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Apply };

  /// The constant 0.
  Expr();

  static Expr constant(cplx value);
  static Expr variable();
  static Expr apply(Func f, Expr arg);
  static Expr pow(Expr base, int exponent);
  /// Binary node without constant folding (Add, Sub, Mul, Div).
  static Expr binary(Kind kind, Expr a, Expr b);
  /// Negation node without folding.
  static Expr negation(Expr a);

  Kind kind() const;
  /// Value of a Constant node.
  cplx value() const;
  /// Exponent of a Pow node.
  int exponent() const;
  Func func() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  /// Operand of Neg, Pow, and Apply nodes.
  const Expr& operand() const;

  bool is_constant() const { return kind() == Kind::Constant; }

  friend Expr operator+(Expr a, Expr b);
  friend Expr operator-(Expr a, Expr b);
  friend Expr operator*(Expr a, Expr b);
  friend Expr operator/(Expr a, Expr b);
  friend Expr operator-(Expr a);

private:
  explicit Expr(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;
};

Expr parse(std::string_view source);

/// Evaluates at real x. Throws DomainError on division by zero or ln(0).
cplx eval(const Expr& e, double x);

/// Samples e at each point.
std::vector<cplx> sample(const Expr& e, std::span<const double> points);

/// Symbolic derivative with respect to x.
Expr derive(const Expr& e);

/// Text that parses back to an expression with identical values.
std::string print(const Expr& e);

/// True when e(-x) = -e(x) at every point to within tol (absolute, scaled
/// by 1 + |e(x)|).
bool is_odd(const Expr& e, std::span<const double> points, double tol = 1e-10);

/// True when Im e(x) vanishes at every point to within tol.
bool is_real_valued(const Expr& e, std::span<const double> points,
                    double tol = 1e-12);

}  // namespace pseudoherm
