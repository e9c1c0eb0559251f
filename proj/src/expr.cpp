#include "ksym/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace ksym {

Dims::Dims(int n_, int k_) : n(n_), k(k_) {
  if (n < 1 || k < 1)
    throw InvalidParameter("chart dimensions must satisfy n >= 1 and k >= 1, got n=" +
                           std::to_string(n) + " k=" + std::to_string(k));
}

std::string Var::name() const {
  if (kind == VarKind::Base) return "q" + std::to_string(i);
  return "v" + std::to_string(i) + "_" + std::to_string(A);
}

int coord_index(const Var& x, const Dims& dims) {
  if (x.i < 1 || x.i > dims.n)
    throw IndexOutOfRange(x.name() + ": coordinate index " + std::to_string(x.i) +
                          " outside 1.." + std::to_string(dims.n));
  if (x.kind == VarKind::Base) return x.i - 1;
  if (x.A < 1 || x.A > dims.k)
    throw IndexOutOfRange(x.name() + ": velocity slot " + std::to_string(x.A) +
                          " outside 1.." + std::to_string(dims.k));
  return dims.n + (x.A - 1) * dims.n + (x.i - 1);
}

namespace detail {

enum class Op { Const, Variable, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp };

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  Var var;             // Variable
  int coord = -1;      // Variable: flat index into a chart point
  int exponent = 0;    // Pow
  NodePtr a, b;
};

}  // namespace detail

using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

std::string print_node(const Node* n);

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = (v == 0.0) ? 0.0 : v;  // collapse -0 so folded zeros print as "0"
  return n;
}

NodePtr make_var(const Var& x, const Dims& dims) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->var = x;
  n->coord = coord_index(x, dims);
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->a = std::move(a);
  n->exponent = exponent;
  return n;
}

bool is_const(const NodePtr& n) { return n->op == Op::Const; }
bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

double int_pow(double x, long long m) {  // m >= 0
  double r = 1.0, base = x;
  for (long long e = m; e > 0; e >>= 1) {
    if (e & 1) r *= base;
    base *= base;
  }
  return r;
}

// Simplifying constructors: constant folding (only when the result stays
// finite), 0/1 absorption, double negation. Everything except the parser
// builds trees through these.

NodePtr s_neg(const NodePtr& a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make_unary(Op::Neg, a);
}

NodePtr fold_or(Op op, double v, const NodePtr& a, const NodePtr& b) {
  if (std::isfinite(v)) return make_const(v);
  return make_binary(op, a, b);
}

NodePtr s_add(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return fold_or(Op::Add, a->value + b->value, a, b);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(Op::Add, a, b);
}

NodePtr s_sub(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return fold_or(Op::Sub, a->value - b->value, a, b);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return s_neg(b);
  return make_binary(Op::Sub, a, b);
}

bool const_mul_split(const NodePtr& n, double& c, NodePtr& rest) {
  if (n->op != Op::Mul) return false;
  if (is_const(n->a)) { c = n->a->value; rest = n->b; return true; }
  if (is_const(n->b)) { c = n->b->value; rest = n->a; return true; }
  return false;
}

NodePtr s_mul(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return fold_or(Op::Mul, a->value * b->value, a, b);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return s_neg(b);
  if (is_const(b, -1.0)) return s_neg(a);
  if (a->op == Op::Neg && b->op == Op::Neg) return s_mul(a->a, b->a);
  if (a->op == Op::Neg) return s_neg(s_mul(a->a, b));
  if (b->op == Op::Neg) return s_neg(s_mul(a, b->a));
  double c = 0.0;
  NodePtr rest;
  if (is_const(a) && const_mul_split(b, c, rest)) return s_mul(make_const(a->value * c), rest);
  if (is_const(b) && const_mul_split(a, c, rest)) return s_mul(make_const(b->value * c), rest);
  return make_binary(Op::Mul, a, b);
}

NodePtr s_div(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b) && b->value != 0.0)
    return fold_or(Op::Div, a->value / b->value, a, b);
  if (is_const(a, 0.0) && !is_const(b)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(b, -1.0)) return s_neg(a);
  return make_binary(Op::Div, a, b);
}

NodePtr s_pow(const NodePtr& a, int m) {
  if (m == 0) return make_const(1.0);
  if (m == 1) return a;
  if (is_const(a)) {
    if (a->value == 0.0 && m < 0) return make_pow(a, m);  // evaluation reports the zero base
    double v = m > 0 ? int_pow(a->value, m) : 1.0 / int_pow(a->value, -(long long)m);
    if (std::isfinite(v)) return make_const(v);
  }
  return make_pow(a, m);
}

NodePtr s_sin(const NodePtr& a) {
  if (is_const(a)) return make_const(std::sin(a->value));
  return make_unary(Op::Sin, a);
}

NodePtr s_cos(const NodePtr& a) {
  if (is_const(a)) return make_const(std::cos(a->value));
  return make_unary(Op::Cos, a);
}

NodePtr s_exp(const NodePtr& a) {
  if (is_const(a)) {
    double v = std::exp(a->value);
    if (std::isfinite(v)) return make_const(v);
  }
  return make_unary(Op::Exp, a);
}

// ---------------------------------------------------------------- printing

std::string fmt_double(double v) { return format_double(v); }

bool neg_like(const Node* n) {
  return n->op == Op::Neg || (n->op == Op::Const && n->value < 0.0);
}

void print_rec(const Node* n, std::string& out);

void print_child(const Node* n, bool parens, std::string& out) {
  if (parens) {
    out += '(';
    print_rec(n, out);
    out += ')';
  } else {
    print_rec(n, out);
  }
}

bool is_additive(const Node* n) { return n->op == Op::Add || n->op == Op::Sub; }
bool is_multiplicative(const Node* n) { return n->op == Op::Mul || n->op == Op::Div; }

void print_rec(const Node* n, std::string& out) {
  switch (n->op) {
    case Op::Const:
      out += fmt_double(n->value);
      break;
    case Op::Variable:
      out += n->var.name();
      break;
    case Op::Add:
    case Op::Sub:
      print_rec(n->a.get(), out);
      out += n->op == Op::Add ? '+' : '-';
      print_child(n->b.get(), is_additive(n->b.get()), out);
      break;
    case Op::Mul:
    case Op::Div:
      // A leading '-' would swallow the whole chain, so a negated left
      // operand needs parentheses; on the right it keeps things readable.
      print_child(n->a.get(), is_additive(n->a.get()) || neg_like(n->a.get()), out);
      out += n->op == Op::Mul ? '*' : '/';
      print_child(n->b.get(),
                  is_additive(n->b.get()) || is_multiplicative(n->b.get()) || neg_like(n->b.get()),
                  out);
      break;
    case Op::Neg:
      out += '-';
      print_child(n->a.get(), is_additive(n->a.get()) || neg_like(n->a.get()), out);
      break;
    case Op::Pow: {
      const Node* base = n->a.get();
      bool atom = base->op == Op::Variable || base->op == Op::Sin || base->op == Op::Cos ||
                  base->op == Op::Exp || (base->op == Op::Const && base->value >= 0.0);
      print_child(base, !atom, out);
      out += '^';
      out += std::to_string(n->exponent);
      break;
    }
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      out += n->op == Op::Sin ? "sin(" : n->op == Op::Cos ? "cos(" : "exp(";
      print_rec(n->a.get(), out);
      out += ')';
      break;
  }
}

std::string print_node(const Node* n) {
  std::string out;
  print_rec(n, out);
  return out;
}

// -------------------------------------------------------------- evaluation

double eval_rec(const Node* n, std::span<const double> p) {
  switch (n->op) {
    case Op::Const:
      return n->value;
    case Op::Variable:
      if (n->coord >= (int)p.size())
        throw DimensionMismatch("point has " + std::to_string(p.size()) +
                                " coordinates but " + n->var.name() + " sits at index " +
                                std::to_string(n->coord));
      return p[n->coord];
    case Op::Add:
      return eval_rec(n->a.get(), p) + eval_rec(n->b.get(), p);
    case Op::Sub:
      return eval_rec(n->a.get(), p) - eval_rec(n->b.get(), p);
    case Op::Mul:
      return eval_rec(n->a.get(), p) * eval_rec(n->b.get(), p);
    case Op::Div: {
      double den = eval_rec(n->b.get(), p);
      if (den == 0.0) throw DivisionByZero("division by zero in " + print_node(n));
      return eval_rec(n->a.get(), p) / den;
    }
    case Op::Neg:
      return -eval_rec(n->a.get(), p);
    case Op::Pow: {
      double x = eval_rec(n->a.get(), p);
      if (n->exponent >= 0) return int_pow(x, n->exponent);
      if (x == 0.0) throw DivisionByZero("zero base with negative exponent in " + print_node(n));
      return 1.0 / int_pow(x, -(long long)n->exponent);
    }
    case Op::Sin:
      return std::sin(eval_rec(n->a.get(), p));
    case Op::Cos:
      return std::cos(eval_rec(n->a.get(), p));
    case Op::Exp:
      return std::exp(eval_rec(n->a.get(), p));
  }
  throw Error("corrupt expression node");
}

DualNumber dual_rec(const Node* n, std::span<const double> p, const Var& seed) {
  switch (n->op) {
    case Op::Const:
      return {n->value, 0.0};
    case Op::Variable:
      if (n->coord >= (int)p.size())
        throw DimensionMismatch("point has " + std::to_string(p.size()) +
                                " coordinates but " + n->var.name() + " sits at index " +
                                std::to_string(n->coord));
      return {p[n->coord], n->var == seed ? 1.0 : 0.0};
    case Op::Add: {
      DualNumber a = dual_rec(n->a.get(), p, seed), b = dual_rec(n->b.get(), p, seed);
      return {a.value + b.value, a.deriv + b.deriv};
    }
    case Op::Sub: {
      DualNumber a = dual_rec(n->a.get(), p, seed), b = dual_rec(n->b.get(), p, seed);
      return {a.value - b.value, a.deriv - b.deriv};
    }
    case Op::Mul: {
      DualNumber a = dual_rec(n->a.get(), p, seed), b = dual_rec(n->b.get(), p, seed);
      return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    }
    case Op::Div: {
      DualNumber a = dual_rec(n->a.get(), p, seed), b = dual_rec(n->b.get(), p, seed);
      if (b.value == 0.0) throw DivisionByZero("division by zero in " + print_node(n));
      return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    }
    case Op::Neg: {
      DualNumber a = dual_rec(n->a.get(), p, seed);
      return {-a.value, -a.deriv};
    }
    case Op::Pow: {
      DualNumber x = dual_rec(n->a.get(), p, seed);
      long long m = n->exponent;
      if (m == 0) return {1.0, 0.0};
      if (x.value == 0.0 && m < 0)
        throw DivisionByZero("zero base with negative exponent in " + print_node(n));
      auto xpow = [&](long long e) {
        return e >= 0 ? int_pow(x.value, e) : 1.0 / int_pow(x.value, -e);
      };
      return {xpow(m), (double)m * xpow(m - 1) * x.deriv};
    }
    case Op::Sin: {
      DualNumber a = dual_rec(n->a.get(), p, seed);
      return {std::sin(a.value), std::cos(a.value) * a.deriv};
    }
    case Op::Cos: {
      DualNumber a = dual_rec(n->a.get(), p, seed);
      return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    }
    case Op::Exp: {
      DualNumber a = dual_rec(n->a.get(), p, seed);
      double e = std::exp(a.value);
      return {e, e * a.deriv};
    }
  }
  throw Error("corrupt expression node");
}

// ----------------------------------------------------------------- parser

struct Token {
  enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type = End;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Token::Type t, std::size_t pos, std::string text) {
    out.push_back({t, 0.0, std::move(text), pos});
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (std::isdigit((unsigned char)c) || c == '.') {
      std::size_t start = i;
      std::string pre, post, expo;
      while (i < src.size() && std::isdigit((unsigned char)src[i])) pre += src[i++];
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && std::isdigit((unsigned char)src[i])) post += src[i++];
      }
      if (pre.empty() && post.empty())
        throw SyntaxError("malformed number at position " + std::to_string(start), start);
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t epos = i++;
        expo = "e";
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) expo += src[i++];
        if (i >= src.size() || !std::isdigit((unsigned char)src[i]))
          throw SyntaxError("malformed exponent at position " + std::to_string(epos), epos);
        while (i < src.size() && std::isdigit((unsigned char)src[i])) expo += src[i++];
      }
      std::string norm = (pre.empty() ? "0" : pre) + "." + (post.empty() ? "0" : post) + expo;
      double value = 0.0;
      auto res = std::from_chars(norm.data(), norm.data() + norm.size(), value);
      if (res.ec != std::errc() || res.ptr != norm.data() + norm.size())
        throw SyntaxError("number out of range at position " + std::to_string(start), start);
      Token t;
      t.type = Token::Number;
      t.number = value;
      t.text = std::string(src.substr(start, i - start));
      t.pos = start;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t start = i;
      while (i < src.size() && (std::isalnum((unsigned char)src[i]) || src[i] == '_')) ++i;
      push(Token::Ident, start, std::string(src.substr(start, i - start)));
      continue;
    }
    switch (c) {
      case '+': push(Token::Plus, i, "+"); break;
      case '-': push(Token::Minus, i, "-"); break;
      case '*': push(Token::Star, i, "*"); break;
      case '/': push(Token::Slash, i, "/"); break;
      case '^': push(Token::Caret, i, "^"); break;
      case '(': push(Token::LParen, i, "("); break;
      case ')': push(Token::RParen, i, ")"); break;
      default:
        throw SyntaxError("unexpected character '" + std::string(1, c) + "' at position " +
                          std::to_string(i), i);
    }
    ++i;
  }
  push(Token::End, src.size(), "");
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, const Dims& dims) : dims_(dims), toks_(lex(src)) {}

  NodePtr run() {
    NodePtr e = expr();
    if (cur().type != Token::End) fail("'+', '-', '*', '/', '^' or end of input");
    return e;
  }

 private:
  Dims dims_;
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& cur() const { return toks_[at_]; }

  bool eat(Token::Type t) {
    if (cur().type != t) return false;
    ++at_;
    return true;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = cur();
    std::string got = t.type == Token::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + expected + ", got " + got + " at position " +
                      std::to_string(t.pos), t.pos);
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (eat(Token::Plus)) left = make_binary(Op::Add, left, term());
      else if (eat(Token::Minus)) left = make_binary(Op::Sub, left, term());
      else return left;
    }
  }

  NodePtr term() {
    // A minus in front of a term negates the whole multiplicative chain,
    // so -a*b reads as -(a*b).
    if (eat(Token::Minus)) return make_unary(Op::Neg, term());
    NodePtr left = factor();
    for (;;) {
      if (eat(Token::Star)) left = make_binary(Op::Mul, left, factor());
      else if (eat(Token::Slash)) left = make_binary(Op::Div, left, factor());
      else return left;
    }
  }

  NodePtr factor() {
    if (eat(Token::Minus)) return make_unary(Op::Neg, factor());
    NodePtr a = atom();
    if (eat(Token::Caret)) return make_pow(a, exponent());
    return a;
  }

  int exponent() {
    bool negative = eat(Token::Minus);
    const Token& t = cur();
    if (t.type != Token::Number) fail("integer exponent");
    for (char c : t.text)
      if (!std::isdigit((unsigned char)c))
        throw SyntaxError("expected integer exponent, got '" + t.text + "' at position " +
                          std::to_string(t.pos), t.pos);
    int m = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), m);
    if (res.ec != std::errc())
      throw SyntaxError("exponent out of range at position " + std::to_string(t.pos), t.pos);
    ++at_;
    return negative ? -m : m;
  }

  NodePtr atom() {
    const Token& t = cur();
    if (t.type == Token::Number) {
      ++at_;
      return make_const(t.number);
    }
    if (t.type == Token::LParen) {
      ++at_;
      NodePtr e = expr();
      if (!eat(Token::RParen)) fail("')'");
      return e;
    }
    if (t.type == Token::Ident) return ident();
    fail("number, variable, function call or '('");
  }

  NodePtr ident() {
    Token t = cur();
    ++at_;
    if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
      if (!eat(Token::LParen)) fail("'(' after '" + t.text + "'");
      NodePtr arg = expr();
      if (!eat(Token::RParen)) fail("')'");
      Op op = t.text == "sin" ? Op::Sin : t.text == "cos" ? Op::Cos : Op::Exp;
      return make_unary(op, arg);
    }
    return make_var(classify(t), dims_);
  }

  Var classify(const Token& t) const {
    const std::string& s = t.text;
    auto as_int = [](std::string_view sv, int& out) {
      if (sv.empty()) return false;
      for (char c : sv)
        if (!std::isdigit((unsigned char)c)) return false;
      auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
      return res.ec == std::errc();
    };
    if (s.size() >= 2 && s[0] == 'q') {
      int i = 0;
      if (as_int(std::string_view(s).substr(1), i)) return Var::base(i);
    }
    if (s.size() >= 4 && s[0] == 'v') {
      std::size_t us = s.find('_');
      if (us != std::string::npos) {
        int i = 0, A = 0;
        if (as_int(std::string_view(s).substr(1, us - 1), i) &&
            as_int(std::string_view(s).substr(us + 1), A))
          return Var::velocity(i, A);
      }
    }
    throw UnknownVariable("unknown variable '" + s + "' at position " + std::to_string(t.pos) +
                          " (expected q<i> or v<i>_<A>)", s);
  }
};

// ------------------------------------------------------------------ misc

bool eq_rec(const Node* x, const Node* y) {
  if (x == y) return true;
  if (x->op != y->op) return false;
  switch (x->op) {
    case Op::Const:
      return x->value == y->value;
    case Op::Variable:
      return x->var == y->var;
    case Op::Pow:
      return x->exponent == y->exponent && eq_rec(x->a.get(), y->a.get());
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      return eq_rec(x->a.get(), y->a.get());
    default:
      return eq_rec(x->a.get(), y->a.get()) && eq_rec(x->b.get(), y->b.get());
  }
}

NodePtr diff_rec(const NodePtr& n, const Var& x) {
  switch (n->op) {
    case Op::Const:
      return make_const(0.0);
    case Op::Variable:
      return make_const(n->var == x ? 1.0 : 0.0);
    case Op::Add:
      return s_add(diff_rec(n->a, x), diff_rec(n->b, x));
    case Op::Sub:
      return s_sub(diff_rec(n->a, x), diff_rec(n->b, x));
    case Op::Mul:
      return s_add(s_mul(diff_rec(n->a, x), n->b), s_mul(n->a, diff_rec(n->b, x)));
    case Op::Div:
      return s_div(s_sub(s_mul(diff_rec(n->a, x), n->b), s_mul(n->a, diff_rec(n->b, x))),
                   s_pow(n->b, 2));
    case Op::Neg:
      return s_neg(diff_rec(n->a, x));
    case Op::Pow:
      if (n->exponent == 0) return make_const(0.0);
      return s_mul(s_mul(make_const(n->exponent), s_pow(n->a, n->exponent - 1)),
                   diff_rec(n->a, x));
    case Op::Sin:
      return s_mul(s_cos(n->a), diff_rec(n->a, x));
    case Op::Cos:
      return s_neg(s_mul(s_sin(n->a), diff_rec(n->a, x)));
    case Op::Exp:
      return s_mul(s_exp(n->a), diff_rec(n->a, x));
  }
  throw Error("corrupt expression node");
}

NodePtr simplify_rec(const NodePtr& n) {
  switch (n->op) {
    case Op::Const:
    case Op::Variable:
      return n;
    case Op::Add:
      return s_add(simplify_rec(n->a), simplify_rec(n->b));
    case Op::Sub:
      return s_sub(simplify_rec(n->a), simplify_rec(n->b));
    case Op::Mul:
      return s_mul(simplify_rec(n->a), simplify_rec(n->b));
    case Op::Div:
      return s_div(simplify_rec(n->a), simplify_rec(n->b));
    case Op::Neg:
      return s_neg(simplify_rec(n->a));
    case Op::Pow:
      return s_pow(simplify_rec(n->a), n->exponent);
    case Op::Sin:
      return s_sin(simplify_rec(n->a));
    case Op::Cos:
      return s_cos(simplify_rec(n->a));
    case Op::Exp:
      return s_exp(simplify_rec(n->a));
  }
  throw Error("corrupt expression node");
}

bool velocity_rec(const Node* n) {
  if (n->op == Op::Variable) return n->var.kind == VarKind::Velocity;
  if (n->a && velocity_rec(n->a.get())) return true;
  if (n->b && velocity_rec(n->b.get())) return true;
  return false;
}

void repr_rec(const Node* n, std::string& out) {
  auto wrap = [&](const char* name) {
    out += name;
    out += '(';
    repr_rec(n->a.get(), out);
    if (n->b) {
      out += ", ";
      repr_rec(n->b.get(), out);
    }
    out += ')';
  };
  switch (n->op) {
    case Op::Const:
      out += "Const(" + fmt_double(n->value) + ")";
      break;
    case Op::Variable:
      out += "Var(" + n->var.name() + ")";
      break;
    case Op::Add: wrap("Add"); break;
    case Op::Sub: wrap("Sub"); break;
    case Op::Mul: wrap("Mul"); break;
    case Op::Div: wrap("Div"); break;
    case Op::Neg: wrap("Neg"); break;
    case Op::Pow:
      out += "Pow(";
      repr_rec(n->a.get(), out);
      out += ", " + std::to_string(n->exponent) + ")";
      break;
    case Op::Sin: wrap("Sin"); break;
    case Op::Cos: wrap("Cos"); break;
    case Op::Exp: wrap("Exp"); break;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ScalarExpr::ScalarExpr() : node_(make_const(0.0)) {}
ScalarExpr::ScalarExpr(detail::NodePtr node) : node_(std::move(node)) {}

ScalarExpr ScalarExpr::constant(double value) { return ScalarExpr(make_const(value)); }

ScalarExpr ScalarExpr::variable(const Var& x, const Dims& dims) {
  return ScalarExpr(make_var(x, dims));
}

bool ScalarExpr::is_constant() const { return node_->op == Op::Const; }

double ScalarExpr::constant_value() const {
  if (!is_constant()) throw PreconditionViolated("constant_value() on a non-constant expression");
  return node_->value;
}

ScalarExpr ScalarExpr::operator-() const { return ScalarExpr(s_neg(node_)); }

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(s_add(a.node(), b.node()));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(s_sub(a.node(), b.node()));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(s_mul(a.node(), b.node()));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(s_div(a.node(), b.node()));
}

ScalarExpr pow(const ScalarExpr& e, int exponent) { return ScalarExpr(s_pow(e.node(), exponent)); }
ScalarExpr sin(const ScalarExpr& e) { return ScalarExpr(s_sin(e.node())); }
ScalarExpr cos(const ScalarExpr& e) { return ScalarExpr(s_cos(e.node())); }
ScalarExpr exp(const ScalarExpr& e) { return ScalarExpr(s_exp(e.node())); }

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
  return eq_rec(a.node().get(), b.node().get());
}

ScalarExpr parse(std::string_view source, const Dims& dims) {
  return ScalarExpr(Parser(source, dims).run());
}

double eval(const ScalarExpr& e, std::span<const double> point) {
  return eval_rec(e.node().get(), point);
}

ScalarExpr diff(const ScalarExpr& e, const Var& x) { return ScalarExpr(diff_rec(e.node(), x)); }

DualNumber eval_dual(const ScalarExpr& e, std::span<const double> point, const Var& seed) {
  return dual_rec(e.node().get(), point, seed);
}

std::string to_string(const ScalarExpr& e) { return print_node(e.node().get()); }

std::string repr(const ScalarExpr& e) {
  std::string out;
  repr_rec(e.node().get(), out);
  return out;
}

ScalarExpr simplify(const ScalarExpr& e) { return ScalarExpr(simplify_rec(e.node())); }

bool depends_on_velocity(const ScalarExpr& e) { return velocity_rec(e.node().get()); }

}  // namespace ksym
