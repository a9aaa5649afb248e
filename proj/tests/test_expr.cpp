// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "finsler/expr.hpp"

using namespace finsler;
using expr::Ast;
using expr::Op;

TEST_CASE("parsing the perturbed norm yields a sum at the root") {
  Ast ast = expr::parse("sqrt(y1^2+y2^2)+0.1*y1", 2);
  REQUIRE(ast.nodes()[static_cast<std::size_t>(ast.root())].op == Op::add);
}

TEST_CASE("variable index out of range") {
  try {
    expr::parse("x3", 2);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::syntax);
    REQUIRE(std::string(e.what()).find("out of range") != std::string::npos);
  }
}

TEST_CASE("truncated input reports the byte offset") {
  try {
    expr::parse("sin(", 2);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::syntax);
    REQUIRE(e.offset() == 4);
  }
}

TEST_CASE("unknown identifier") {
  REQUIRE_THROWS_AS(expr::parse("tan(y1)", 2), Error);
  REQUIRE_THROWS_AS(expr::parse("foo", 2), Error);
}

namespace {

// Hand-rolled AST generator for the round-trip property.
struct Gen {
  std::mt19937_64 rng;
  int dim;

  explicit Gen(std::uint64_t seed, int d) : rng(seed), dim(d) {}

  double unif() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  std::string atom() {
    switch (pick(3)) {
      case 0: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", 0.1 + unif());
        return buf;
      }
      case 1:
        return "x" + std::to_string(1 + pick(dim));
      default:
        return "y" + std::to_string(1 + pick(dim));
    }
  }

  std::string gen(int depth) {
    if (depth <= 0) return atom();
    switch (pick(8)) {
      case 0:
        return gen(depth - 1) + "+" + gen(depth - 1);
      case 1:
        return gen(depth - 1) + "-" + gen(depth - 1);
      case 2:
        return gen(depth - 1) + "*" + gen(depth - 1);
      case 3:
        return "(" + gen(depth - 1) + ")/(" + gen(depth - 1) + "+3)";
      case 4:
        return "-(" + gen(depth - 1) + ")";
      case 5:
        return "sin(" + gen(depth - 1) + ")";
      case 6:
        return "(" + gen(depth - 1) + ")^2";
      default:
        return "exp(" + gen(depth - 1) + ")";
    }
  }
};

}  // namespace

TEST_CASE("printing re-parses to an equal tree") {
  Gen gen(991, 2);
  for (int rep = 0; rep < 200; ++rep) {
    Ast ast = expr::parse(gen.gen(3), 2);
    std::string printed = expr::to_string(ast);
    Ast back = expr::parse(printed, 2);
    INFO(printed);
    REQUIRE(expr::equal(ast, back));
    REQUIRE(expr::to_string(back) == printed);
  }
}

TEST_CASE("jet evaluation of a monomial") {
  Ast ast = expr::parse("y1^2", 2);
  expr::EvalContext ctx = expr::EvalContext::some(2, 4, {2});  // seed y1 only
  Jet v = expr::eval_jet(ast, SlitPoint({0.0, 0.0}, {3.0, 1.0}), ctx);
  REQUIRE(v.value() == Catch::Approx(9.0));
  REQUIRE(v.partial({1}) == Catch::Approx(6.0));
  REQUIRE(v.partial({2}) == Catch::Approx(2.0));  // second derivative
}

TEST_CASE("jet evaluation of the euclidean norm at a pole of smoothness") {
  Ast ast = expr::parse("sqrt(y1^2+y2^2)", 2);
  expr::EvalContext ctx = expr::EvalContext::some(2, 2, {2, 3});
  Jet v = expr::eval_jet(ast, SlitPoint({0.0, 0.0}, {0.0, 1.0}), ctx);
  REQUIRE(v.value() == Catch::Approx(1.0));
  REQUIRE(v.partial({1, 0}) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(v.partial({0, 1}) == Catch::Approx(1.0));
  REQUIRE(v.partial({2, 0}) == Catch::Approx(1.0));   // Hessian [[1,0],[0,0]]
  REQUIRE(v.partial({1, 1}) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(v.partial({0, 2}) == Catch::Approx(0.0).margin(1e-14));

  // cross-check the Hessian entry against a central difference at step 1e-5
  auto f = [](double y1, double y2) { return std::sqrt(y1 * y1 + y2 * y2); };
  double h = 1e-5;
  double fd = (f(h, 1.0) + f(-h, 1.0) - 2.0 * f(0.0, 1.0)) / (h * h);
  REQUIRE(std::abs(v.partial({2, 0}) - fd) < 1e-6);
}

TEST_CASE("domain and arithmetic errors surface from evaluation") {
  Ast lg = expr::parse("log(y1)", 2);
  expr::EvalContext ctx = expr::EvalContext::all(2, 2);
  REQUIRE_THROWS_AS(expr::eval_jet(lg, SlitPoint({0.0, 0.0}, {0.0, 1.0}), ctx), Error);
  std::vector<double> x{0.0, 0.0}, y{0.0, 1.0};
  REQUIRE_THROWS_AS(expr::eval(lg, x, y), Error);

  Ast dv = expr::parse("1/y1", 2);
  REQUIRE_THROWS_AS(expr::eval(dv, x, y), Error);
}

TEST_CASE("order-0 part equals plain evaluation") {
  Gen gen(1234, 2);
  expr::EvalContext ctx = expr::EvalContext::all(2, 3);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Ast ast = expr::parse(gen.gen(3), 2);
    std::vector<double> x{0.3 + 0.2 * gen.unif(), -0.4 + 0.2 * gen.unif()};
    std::vector<double> y{0.8 + 0.3 * gen.unif(), 0.5 + 0.3 * gen.unif()};
    double plain;
    try {
      plain = expr::eval(ast, x, y);
    } catch (const Error&) {
      continue;  // generator can produce expressions outside their domain
    }
    if (!std::isfinite(plain) || std::abs(plain) > 1e8) continue;
    Jet v = expr::eval_jet(ast, SlitPoint(x, y), ctx);
    REQUIRE(v.value() == Catch::Approx(plain).epsilon(1e-12));
    ++checked;
  }
  REQUIRE(checked > 50);
}

TEST_CASE("non-integer exponents lower to exp of log") {
  Ast ast = expr::parse("y1^2.5", 2);
  std::vector<double> x{0.0, 0.0}, y{2.0, 1.0};
  REQUIRE(expr::eval(ast, x, y) == Catch::Approx(std::pow(2.0, 2.5)));
  std::vector<double> yneg{-2.0, 1.0};
  REQUIRE_THROWS_AS(expr::eval(ast, x, yneg), Error);
}

TEST_CASE("evaluation context validates its inputs") {
  REQUIRE_THROWS_AS(expr::EvalContext::some(2, 3, {5}), Error);
  Ast ast = expr::parse("y1+y2", 2);
  expr::EvalContext wrong = expr::EvalContext::all(3, 3);
  REQUIRE_THROWS_AS(expr::eval_jet(ast, SlitPoint({0, 0}, {1, 1}), wrong), Error);
}
