// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "finsler/fields.hpp"
#include "finsler/randers.hpp"

namespace finsler::cat {

struct Tags {
  bool closed = false;       // d(b_i dx^i) = 0
  bool parallel_b = false;   // nabla_e b = 0
  bool flat = false;         // base horizontal curvature vanishes
  bool berwald_base = false;
  bool landsberg_base = false;
};

struct CatalogEntry {
  std::string id;
  std::string description;
  int n = 2;
  std::string base_L;
  std::vector<std::string> one_form;
  std::vector<std::array<double, 2>> x_box;
  Tags tags;
};

inline const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> list = {
      {"euclid_flat",
       "Euclidean norm, zero perturbation",
       2,
       "sqrt(y1^2+y2^2)",
       {"0", "0"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {true, true, true, true, true}},
      {"euclid_const_b",
       "Euclidean norm with a constant one-form (parallel, closed)",
       2,
       "sqrt(y1^2+y2^2)",
       {"0.1", "0"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {true, true, true, true, true}},
      {"euclid_closed_b",
       "Euclidean norm with the exact one-form 0.5 cos(x1) dx1",
       2,
       "sqrt(y1^2+y2^2)",
       {"0.5*cos(x1)", "0"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {true, false, true, true, true}},
      {"euclid_curl_b",
       "Euclidean norm with the non-closed one-form 0.1(-x2 dx1 + x1 dx2)",
       2,
       "sqrt(y1^2+y2^2)",
       {"-0.1*x2", "0.1*x1"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {false, false, true, true, true}},
      {"conformal_const_b",
       "Conformally Euclidean base exp(x1)|y| with a constant one-form",
       2,
       "exp(x1)*sqrt(y1^2+y2^2)",
       {"0.1", "0"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {true, false, true, true, true}},
      {"hyperbolic_const_b",
       "Hyperbolic-plane base sqrt(y1^2 + exp(2 x1) y2^2) with a constant one-form",
       2,
       "sqrt(y1^2+exp(2*x1)*y2^2)",
       {"0.1", "0"},
       {{-0.5, 0.5}, {-0.5, 0.5}},
       {true, false, false, true, true}},
      {"finsler_generic_b",
       "Base with nonvanishing torsion (a perturbed norm itself) and a generic one-form",
       2,
       "sqrt(y1^2+y2^2)+0.2*cos(x1)*y1",
       {"0.15*x2", "0.1"},
       {{-1.0, 1.0}, {-1.0, 1.0}},
       {false, false, false, false, false}},
  };
  return list;
}

inline const CatalogEntry* find(const std::string& id) {
  for (const CatalogEntry& e : entries())
    if (e.id == id) return &e;
  return nullptr;
}

inline randers::RandersBundle make_bundle(const CatalogEntry& e) {
  MetricField base = make_metric(e.id + ":base", e.n, e.base_L);
  OneFormField form(e.n, e.one_form);
  return randers::make_bundle(std::move(base), std::move(form), e.id);
}

inline randers::RandersBundle make_bundle(const std::string& id) {
  const CatalogEntry* e = find(id);
  if (!e) throw Error(ErrorKind::config, "unknown catalog instance '" + id + "'");
  return make_bundle(*e);
}

}  // namespace finsler::cat
