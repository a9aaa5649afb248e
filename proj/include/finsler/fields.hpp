// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "finsler/common.hpp"
#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

namespace finsler {

// An evaluable scalar on the slit bundle.  Both the plain and the jet path
// are exposed so downstream code can pick precision work per call site.
class ScalarField {
public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double eval(const std::vector<double>& x, const std::vector<double>& y) const = 0;
  virtual Jet eval(const std::vector<Jet>& x, const std::vector<Jet>& y) const = 0;
};

class ExprScalarField final : public ScalarField {
public:
  explicit ExprScalarField(expr::Ast ast) : ast_(std::move(ast)) {}
  int dim() const override { return ast_.dim(); }
  double eval(const std::vector<double>& x, const std::vector<double>& y) const override { return expr::eval(ast_, x, y); }
  Jet eval(const std::vector<Jet>& x, const std::vector<Jet>& y) const override { return expr::eval(ast_, x, y); }
  const expr::Ast& ast() const { return ast_; }

private:
  expr::Ast ast_;
};

// A metric function L(x, y): positive and positively 1-homogeneous in y on
// its admissible set.  Homogeneity and positive-definiteness of the derived
// metric tensor are enforced by the verification suite, not at construction.
struct MetricField {
  std::string id;
  int n = 0;
  std::shared_ptr<const ScalarField> L;

  double operator()(const std::vector<double>& x, const std::vector<double>& y) const { return L->eval(x, y); }
};

inline MetricField make_metric(std::string id, int n, const std::string& source) {
  expr::Ast ast = expr::parse(source, n);
  return MetricField{std::move(id), n, std::make_shared<ExprScalarField>(std::move(ast))};
}

// n covector components b_i(x), functions of the chart variables only.
class OneFormField {
public:
  OneFormField() = default;

  OneFormField(int n, const std::vector<std::string>& sources) : n_(n) {
    if (static_cast<int>(sources.size()) != n) throw Error(ErrorKind::config, "one-form needs exactly n component expressions");
    comps_.reserve(sources.size());
    for (const std::string& s : sources) {
      expr::Ast ast = expr::parse(s, n);
      if (ast.uses_fibre_variables())
        throw Error(ErrorKind::config, "one-form components must depend on x only: '" + s + "'");
      comps_.push_back(std::move(ast));
    }
  }

  int dim() const { return n_; }

  const std::vector<expr::Ast>& components() const { return comps_; }

  template <class Scalar>
  std::vector<Scalar> eval(const std::vector<Scalar>& x, const std::vector<Scalar>& y) const {
    std::vector<Scalar> out;
    out.reserve(comps_.size());
    for (const expr::Ast& c : comps_) out.push_back(expr::eval(c, x, y));
    return out;
  }

private:
  int n_ = 0;
  std::vector<expr::Ast> comps_;
};

// L*(x, y) = L(x, y) + b_i(x) y^i.
class RandersScalarField final : public ScalarField {
public:
  RandersScalarField(std::shared_ptr<const ScalarField> base, OneFormField form)
      : base_(std::move(base)), form_(std::move(form)) {}

  int dim() const override { return base_->dim(); }

  double eval(const std::vector<double>& x, const std::vector<double>& y) const override {
    double v = base_->eval(x, y);
    std::vector<double> b = form_.eval(x, y);
    for (std::size_t i = 0; i < b.size(); ++i) v += b[i] * y[i];
    return v;
  }

  Jet eval(const std::vector<Jet>& x, const std::vector<Jet>& y) const override {
    Jet v = base_->eval(x, y);
    std::vector<Jet> b = form_.eval(x, y);
    for (std::size_t i = 0; i < b.size(); ++i) v += b[i] * y[i];
    return v;
  }

private:
  std::shared_ptr<const ScalarField> base_;
  OneFormField form_;
};

}  // namespace finsler
