#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "ksym/errors.hpp"

namespace ksym {

/// Chart dimensions of T^1_k Q: n base coordinates q^i and k velocity
/// slots per coordinate, v^i_A with i = 1..n, A = 1..k.
struct Dims {
  int n = 1;
  int k = 1;

  Dims() = default;
  Dims(int n_, int k_);

  /// Total chart dimension n + n*k.
  int total() const { return n + n * k; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

enum class VarKind { Base, Velocity };

/// One chart coordinate, q^i or v^i_A. Indices are 1-based.
struct Var {
  VarKind kind = VarKind::Base;
  int i = 1;
  int A = 0;  // velocity slot, 0 for base coordinates

  static Var base(int i) { return {VarKind::Base, i, 0}; }
  static Var velocity(int i, int A) { return {VarKind::Velocity, i, A}; }

  /// The source-level name, "q2" or "v1_3".
  std::string name() const;

  friend bool operator==(const Var&, const Var&) = default;
};

/// Flat position of a variable under the fixed coordinate ordering:
/// q^1..q^n first, then the velocity blocks A = 1..k, each of length n.
/// Throws IndexOutOfRange if the variable does not fit the dimensions.
int coord_index(const Var& x, const Dims& dims);

/// Value and first derivative carried together through an evaluation.
struct DualNumber {
  double value = 0.0;
  double deriv = 0.0;
};

namespace detail {
struct Node;
using NodePtr = std::shared_ptr<const Node>;
}  // namespace detail

/// Immutable scalar expression over the chart coordinates. Copies share
/// structure; all operations build new trees. The arithmetic operators
/// fold constants and absorb 0/1 units, so formulas assembled from them
/// come out lightly simplified.
class ScalarExpr {
 public:
  /// The constant 0.
  ScalarExpr();

  static ScalarExpr constant(double value);
  static ScalarExpr variable(const Var& x, const Dims& dims);

  bool is_constant() const;
  /// Value of a constant node; requires is_constant().
  double constant_value() const;

  ScalarExpr operator-() const;

  const detail::NodePtr& node() const { return node_; }
  explicit ScalarExpr(detail::NodePtr node);

 private:
  detail::NodePtr node_;
};

ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);

/// Integer power; the exponent may be negative. pow(e, 0) is the constant 1.
ScalarExpr pow(const ScalarExpr& e, int exponent);
ScalarExpr sin(const ScalarExpr& e);
ScalarExpr cos(const ScalarExpr& e);
ScalarExpr exp(const ScalarExpr& e);

/// Structural equality: same tree shape, same constants, same variables.
bool operator==(const ScalarExpr&, const ScalarExpr&);
inline bool operator!=(const ScalarExpr& a, const ScalarExpr& b) { return !(a == b); }

/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := '-' factor | atom ('^' integer)?
///   atom   := number | variable | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | exp
/// with variables q<i> and v<i>_<A>, whitespace ignored. A minus sign in
/// front of a term negates the whole multiplicative chain. No
/// simplification is applied; the returned tree mirrors the source.
ScalarExpr parse(std::string_view source, const Dims& dims);

/// Evaluate at a full chart point (length n + n*k, fixed ordering).
double eval(const ScalarExpr& e, std::span<const double> point);

/// Exact symbolic partial derivative with respect to x. The result is
/// simplified by constant folding and unit elimination.
ScalarExpr diff(const ScalarExpr& e, const Var& x);

/// Forward-mode derivative along the coordinate `seed`, one pass.
DualNumber eval_dual(const ScalarExpr& e, std::span<const double> point, const Var& seed);

/// Render the expression so that parse(to_string(e)) rebuilds it.
std::string to_string(const ScalarExpr& e);

/// Structure dump for tests and debugging, e.g. "Neg(Mul(Var(q1), Const(2)))".
std::string repr(const ScalarExpr& e);

/// Bottom-up constant folding, 0/1 unit absorption, double negation removal.
ScalarExpr simplify(const ScalarExpr& e);

/// True if any velocity coordinate v^i_A occurs in the tree.
bool depends_on_velocity(const ScalarExpr& e);

/// Shortest decimal form that round-trips through from_chars. Used for every
/// number this library prints, so reports and CSV files are reproducible.
std::string format_double(double value);

}  // namespace ksym
