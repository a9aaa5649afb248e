// SPDX-License-Identifier: Apache-2.0
//
// Analytic scalar expressions over the chart variables x1..xn and the fibre
// variables y1..yn.  The grammar is documented in docs/grammar.md; evaluation
// is generic over the scalar ring so the same tree runs on plain doubles and
// on jets.
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/common.hpp"
#include "finsler/jet.hpp"

namespace finsler::expr {

enum class Op : std::uint8_t {
  constant,
  var_x,
  var_y,
  neg,
  fn_sqrt,
  fn_sin,
  fn_cos,
  fn_exp,
  fn_log,
  add,
  sub,
  mul,
  div,
  pow
};

struct Node {
  Op op = Op::constant;
  double value = 0.0;  // constant payload, or the exponent for pow
  int index = -1;      // zero-based variable index for var_x / var_y
  int a = -1, b = -1;  // child node slots
};

class Ast {
public:
  Ast() = default;
  Ast(std::vector<Node> nodes, int root, int dim) : nodes_(std::move(nodes)), root_(root), dim_(dim) {}

  int dim() const { return dim_; }
  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  bool uses_fibre_variables() const {
    for (const Node& n : nodes_)
      if (n.op == Op::var_y) return true;
    return false;
  }

private:
  std::vector<Node> nodes_;
  int root_ = -1;
  int dim_ = 0;
};

namespace detail {

class Parser {
public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  Ast run() {
    skip_ws();
    int root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input", pos_);
    return Ast(std::move(nodes_), root, dim_);
  }

private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw Error(ErrorKind::syntax, what + " at offset " + std::to_string(at), at);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+')) {
        int rhs = parse_term();
        lhs = push({Op::add, 0.0, -1, lhs, rhs});
      } else if (eat('-')) {
        int rhs = parse_term();
        lhs = push({Op::sub, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (eat('*')) {
        int rhs = parse_unary();
        lhs = push({Op::mul, 0.0, -1, lhs, rhs});
      } else if (eat('/')) {
        int rhs = parse_unary();
        lhs = push({Op::div, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    skip_ws();
    if (eat('-')) return push({Op::neg, 0.0, -1, parse_unary(), -1});
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    int base = parse_atom();
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '^') {
      ++pos_;
      skip_ws();
      double sign = 1.0;
      if (eat('-')) sign = -1.0;
      std::size_t at = pos_;
      double expo = parse_number_literal("exponent must be a numeric literal");
      (void)at;
      return push({Op::pow, sign * expo, -1, base, -1});
    }
    return base;
  }

  double parse_number_literal(const char* context) {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= src_.size() || (!std::isdigit(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != '.'))
      fail(context, pos_);
    double out = 0.0;
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{}) fail("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return out;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input", pos_);
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = parse_number_literal("number expected");
      return push({Op::constant, v, -1, -1, -1});
    }
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!eat(')')) fail("missing ')'", pos_);
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      std::string_view name = src_.substr(start, pos_ - start);
      // variables: x<k> / y<k>, 1-based index
      if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1) {
        bool digits = true;
        for (std::size_t i = 1; i < name.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
        if (digits) {
          int idx = 0;
          std::from_chars(name.data() + 1, name.data() + name.size(), idx);
          if (idx < 1 || idx > dim_)
            throw Error(ErrorKind::syntax,
                        "variable index out of range for dimension " + std::to_string(dim_) + ": " + std::string(name) +
                            " at offset " + std::to_string(start),
                        start);
          return push({name[0] == 'x' ? Op::var_x : Op::var_y, 0.0, idx - 1, -1, -1});
        }
      }
      Op fn;
      if (name == "sqrt")
        fn = Op::fn_sqrt;
      else if (name == "sin")
        fn = Op::fn_sin;
      else if (name == "cos")
        fn = Op::fn_cos;
      else if (name == "exp")
        fn = Op::fn_exp;
      else if (name == "log")
        fn = Op::fn_log;
      else
        throw Error(ErrorKind::syntax, "unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start),
                    start);
      if (!eat('(')) fail("expected '(' after function name", pos_);
      int arg = parse_expr();
      if (!eat(')')) fail("missing ')'", pos_);
      return push({fn, 0.0, -1, arg, -1});
    }
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace detail

inline Ast parse(std::string_view source, int dim) {
  if (dim < 1) throw Error(ErrorKind::config, "dimension must be >= 1");
  detail::Parser p(source, dim);
  return p.run();
}

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::neg:
      return 3;
    case Op::pow:
      return 4;
    default:
      return 5;
  }
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline void print_node(const Ast& ast, int idx, int parent_prec, std::string& out) {
  const Node& n = ast.nodes()[static_cast<std::size_t>(idx)];
  int prec = precedence(n.op);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (n.op) {
    case Op::constant:
      out += format_double(n.value);
      break;
    case Op::var_x:
      out += 'x' + std::to_string(n.index + 1);
      break;
    case Op::var_y:
      out += 'y' + std::to_string(n.index + 1);
      break;
    case Op::neg:
      out += '-';
      print_node(ast, n.a, prec + 1, out);
      break;
    case Op::fn_sqrt:
    case Op::fn_sin:
    case Op::fn_cos:
    case Op::fn_exp:
    case Op::fn_log: {
      const char* name = n.op == Op::fn_sqrt ? "sqrt"
                         : n.op == Op::fn_sin ? "sin"
                         : n.op == Op::fn_cos ? "cos"
                         : n.op == Op::fn_exp ? "exp"
                                              : "log";
      out += name;
      out += '(';
      print_node(ast, n.a, 0, out);
      out += ')';
      break;
    }
    case Op::add:
      print_node(ast, n.a, prec, out);
      out += '+';
      print_node(ast, n.b, prec + 1, out);
      break;
    case Op::sub:
      print_node(ast, n.a, prec, out);
      out += '-';
      print_node(ast, n.b, prec + 1, out);
      break;
    case Op::mul:
      print_node(ast, n.a, prec, out);
      out += '*';
      print_node(ast, n.b, prec + 1, out);
      break;
    case Op::div:
      print_node(ast, n.a, prec, out);
      out += '/';
      print_node(ast, n.b, prec + 1, out);
      break;
    case Op::pow:
      print_node(ast, n.a, prec + 1, out);
      out += '^';
      if (n.value < 0) {
        out += '-';
        out += format_double(-n.value);
      } else {
        out += format_double(n.value);
      }
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const Ast& ast) {
  std::string out;
  if (!ast.empty()) detail::print_node(ast, ast.root(), 0, out);
  return out;
}

// Structural equality up to node numbering.
inline bool equal(const Ast& a, const Ast& b) {
  if (a.dim() != b.dim()) return false;
  std::function<bool(int, int)> rec = [&](int ia, int ib) {
    if ((ia < 0) != (ib < 0)) return false;
    if (ia < 0) return true;
    const Node& na = a.nodes()[static_cast<std::size_t>(ia)];
    const Node& nb = b.nodes()[static_cast<std::size_t>(ib)];
    if (na.op != nb.op || na.index != nb.index || na.value != nb.value) return false;
    return rec(na.a, nb.a) && rec(na.b, nb.b);
  };
  return rec(a.root(), b.root());
}

// Evaluation, generic over the scalar ring.  Scalar must provide the four
// arithmetic operators, unary minus, and sqrt/sin/cos/exp/log/pow found by
// ADL (double uses the std overloads).
template <class Scalar>
Scalar eval(const Ast& ast, const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  if (static_cast<int>(x.size()) != ast.dim() || static_cast<int>(y.size()) != ast.dim())
    throw Error(ErrorKind::config, "evaluation point dimension mismatch");
  const auto& nodes = ast.nodes();
  std::vector<Scalar> memo(nodes.size());
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    switch (n.op) {
      case Op::constant:
        memo[i] = Scalar(n.value);
        break;
      case Op::var_x:
        memo[i] = x[static_cast<std::size_t>(n.index)];
        break;
      case Op::var_y:
        memo[i] = y[static_cast<std::size_t>(n.index)];
        break;
      case Op::neg:
        memo[i] = -memo[static_cast<std::size_t>(n.a)];
        break;
      case Op::fn_sqrt: {
        if constexpr (std::is_same_v<Scalar, double>) {
          double u = memo[static_cast<std::size_t>(n.a)];
          if (u <= 0.0) throw Error(ErrorKind::domain, "sqrt of non-positive value");
          memo[i] = sqrt(u);
        } else {
          memo[i] = sqrt(memo[static_cast<std::size_t>(n.a)]);
        }
        break;
      }
      case Op::fn_sin:
        memo[i] = sin(memo[static_cast<std::size_t>(n.a)]);
        break;
      case Op::fn_cos:
        memo[i] = cos(memo[static_cast<std::size_t>(n.a)]);
        break;
      case Op::fn_exp:
        memo[i] = exp(memo[static_cast<std::size_t>(n.a)]);
        break;
      case Op::fn_log: {
        if constexpr (std::is_same_v<Scalar, double>) {
          double u = memo[static_cast<std::size_t>(n.a)];
          if (u <= 0.0) throw Error(ErrorKind::domain, "log of non-positive value");
          memo[i] = log(u);
        } else {
          memo[i] = log(memo[static_cast<std::size_t>(n.a)]);
        }
        break;
      }
      case Op::add:
        memo[i] = memo[static_cast<std::size_t>(n.a)] + memo[static_cast<std::size_t>(n.b)];
        break;
      case Op::sub:
        memo[i] = memo[static_cast<std::size_t>(n.a)] - memo[static_cast<std::size_t>(n.b)];
        break;
      case Op::mul:
        memo[i] = memo[static_cast<std::size_t>(n.a)] * memo[static_cast<std::size_t>(n.b)];
        break;
      case Op::div: {
        if constexpr (std::is_same_v<Scalar, double>) {
          double d = memo[static_cast<std::size_t>(n.b)];
          if (d == 0.0) throw Error(ErrorKind::domain, "division by zero");
          memo[i] = memo[static_cast<std::size_t>(n.a)] / d;
        } else {
          memo[i] = memo[static_cast<std::size_t>(n.a)] / memo[static_cast<std::size_t>(n.b)];
        }
        break;
      }
      case Op::pow: {
        double e = n.value;
        double r = std::round(e);
        if constexpr (std::is_same_v<Scalar, double>) {
          double u = memo[static_cast<std::size_t>(n.a)];
          if (r == e && std::abs(e) <= 64.0) {
            memo[i] = pow(u, e);
          } else {
            if (u <= 0.0) throw Error(ErrorKind::domain, "non-integer power of non-positive value");
            memo[i] = exp(e * log(u));
          }
        } else {
          memo[i] = pow(memo[static_cast<std::size_t>(n.a)], e);
        }
        break;
      }
    }
  }
  return memo[static_cast<std::size_t>(ast.root())];
}

// Which of the 2n bundle variables carry jet seeds, and at what order.
struct EvalContext {
  int dim = 0;
  int order = 4;
  std::vector<int> seed_slot;  // size 2n: x1..xn then y1..yn; -1 = unseeded

  static EvalContext all(int dim, int order) {
    EvalContext c;
    c.dim = dim;
    c.order = order;
    c.seed_slot.resize(static_cast<std::size_t>(2 * dim));
    for (int i = 0; i < 2 * dim; ++i) c.seed_slot[static_cast<std::size_t>(i)] = i;
    return c;
  }

  // seeds: indices into the 2n variable list (x first, then y)
  static EvalContext some(int dim, int order, const std::vector<int>& seeds) {
    EvalContext c;
    c.dim = dim;
    c.order = order;
    c.seed_slot.assign(static_cast<std::size_t>(2 * dim), -1);
    int slot = 0;
    for (int v : seeds) {
      if (v < 0 || v >= 2 * dim) throw Error(ErrorKind::config, "seed variable out of range");
      c.seed_slot[static_cast<std::size_t>(v)] = slot++;
    }
    return c;
  }

  int seeded_count() const {
    int m = 0;
    for (int s : seed_slot)
      if (s >= 0) ++m;
    return m;
  }
};

// Evaluates the tree in jet arithmetic at a slit point, seeding the variables
// chosen by the context.
inline Jet eval_jet(const Ast& ast, const SlitPoint& p, const EvalContext& ctx) {
  if (static_cast<int>(p.dim()) != ctx.dim || ast.dim() != ctx.dim)
    throw Error(ErrorKind::config, "point/context dimension mismatch");
  int m = ctx.seeded_count();
  if (m == 0) throw Error(ErrorKind::config, "evaluation context seeds no variables");
  auto space = JetSpace::get(m, ctx.order);
  std::vector<Jet> xs(p.dim()), ys(p.dim());
  for (int i = 0; i < ctx.dim; ++i) {
    int sx = ctx.seed_slot[static_cast<std::size_t>(i)];
    int sy = ctx.seed_slot[static_cast<std::size_t>(ctx.dim + i)];
    xs[static_cast<std::size_t>(i)] =
        sx >= 0 ? Jet::variable(space, p.x[static_cast<std::size_t>(i)], sx, ctx.order) : Jet(p.x[static_cast<std::size_t>(i)]);
    ys[static_cast<std::size_t>(i)] =
        sy >= 0 ? Jet::variable(space, p.y[static_cast<std::size_t>(i)], sy, ctx.order) : Jet(p.y[static_cast<std::size_t>(i)]);
  }
  return eval(ast, xs, ys);
}

}  // namespace finsler::expr
