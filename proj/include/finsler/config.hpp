// SPDX-License-Identifier: Apache-2.0
//
// Run configuration (JSON document) and report serialization.  The report
// layout is stable and fully deterministic apart from the optional meta
// block; see docs/formats.md.
#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/catalog.hpp"
#include "finsler/randers.hpp"
#include "finsler/verify.hpp"

namespace finsler::config {

using json = nlohmann::json;

struct GeodesicJob {
  std::vector<double> x0;
  std::vector<double> y0;
  double t_end = 1.0;
};

struct RunConfig {
  int n = 0;
  std::string instance;             // catalog id, or empty for a custom pair
  std::string base_metric;          // expression, custom instances only
  std::vector<std::string> one_form;
  verify::SamplePlan plan;
  std::vector<std::string> checks;  // resolved list of check ids
  std::map<std::string, double> tolerances;
  int jet_order = 4;
  std::optional<GeodesicJob> geodesic;
  std::string hash;                 // canonical content hash
};

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::config, what); }

inline std::vector<std::array<double, 2>> parse_box(const json& j, int n, const char* field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail(std::string(field) + " must be an array of n [lo, hi] pairs");
  std::vector<std::array<double, 2>> box;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) fail(std::string(field) + " entries must be [lo, hi] pairs");
    double lo = e[0].get<double>(), hi = e[1].get<double>();
    if (!(lo < hi)) fail(std::string(field) + " entries must satisfy lo < hi");
    box.push_back({lo, hi});
  }
  return box;
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  if (!doc.is_object()) detail::fail("configuration must be a JSON object");

  if (!doc.contains("dimension")) detail::fail("missing field 'dimension'");
  cfg.n = doc.at("dimension").get<int>();
  if (cfg.n < 2 || cfg.n > 6) detail::fail("invalid dimension: expected 2 <= n <= 6");

  const cat::CatalogEntry* entry = nullptr;
  if (doc.contains("instance")) {
    cfg.instance = doc.at("instance").get<std::string>();
    entry = cat::find(cfg.instance);
    if (!entry) detail::fail("unknown catalog instance '" + cfg.instance + "'");
    if (entry->n != cfg.n) detail::fail("catalog instance '" + cfg.instance + "' has dimension " + std::to_string(entry->n));
  } else {
    if (!doc.contains("base_metric") || !doc.contains("one_form"))
      detail::fail("configuration needs either 'instance' or both 'base_metric' and 'one_form'");
    cfg.base_metric = doc.at("base_metric").get<std::string>();
    cfg.one_form = doc.at("one_form").get<std::vector<std::string>>();
    if (static_cast<int>(cfg.one_form.size()) != cfg.n) detail::fail("'one_form' must list exactly n expressions");
    // parse eagerly so bad expressions are reported against their field
    try {
      expr::parse(cfg.base_metric, cfg.n);
    } catch (const Error& e) {
      detail::fail(std::string("in field 'base_metric': ") + e.what());
    }
    for (std::size_t i = 0; i < cfg.one_form.size(); ++i) {
      try {
        expr::Ast ast = expr::parse(cfg.one_form[i], cfg.n);
        if (ast.uses_fibre_variables()) detail::fail("one-form components must depend on x only");
      } catch (const Error& e) {
        detail::fail("in field 'one_form[" + std::to_string(i) + "]': " + e.what());
      }
    }
    cfg.instance = doc.value("id", std::string("custom"));
  }

  const json sample = doc.value("sample", json::object());
  if (!sample.contains("seed")) detail::fail("seed required (sample.seed; wall-clock defaults are not permitted)");
  cfg.plan.seed = sample.at("seed").get<std::uint64_t>();
  cfg.plan.count = sample.value("count", 100);
  if (cfg.plan.count < 1) detail::fail("sample.count must be >= 1");
  cfg.plan.instance = cfg.instance;
  if (sample.contains("x_box")) {
    cfg.plan.x_box = detail::parse_box(sample.at("x_box"), cfg.n, "sample.x_box");
  } else if (entry) {
    cfg.plan.x_box = entry->x_box;
  } else {
    cfg.plan.x_box.assign(static_cast<std::size_t>(cfg.n), {-1.0, 1.0});
  }
  if (sample.contains("y_scale")) {
    const json& ys = sample.at("y_scale");
    if (!ys.is_array() || ys.size() != 2) detail::fail("sample.y_scale must be [min, max]");
    cfg.plan.y_scale_min = ys[0].get<double>();
    cfg.plan.y_scale_max = ys[1].get<double>();
    if (!(cfg.plan.y_scale_min > 0.0) || !(cfg.plan.y_scale_max >= cfg.plan.y_scale_min))
      detail::fail("sample.y_scale must satisfy 0 < min <= max");
  }

  if (doc.contains("checks")) {
    const json& cj = doc.at("checks");
    if (!cj.is_array()) detail::fail("'checks' must be an array of check ids");
    for (const auto& c : cj) {
      std::string id = c.get<std::string>();
      if (id == "default") {
        for (std::string& d : verify::default_check_ids()) cfg.checks.push_back(std::move(d));
      } else {
        if (!verify::find_check(id)) detail::fail("unknown check id '" + id + "'");
        cfg.checks.push_back(std::move(id));
      }
    }
  } else {
    cfg.checks = verify::default_check_ids();
  }

  if (doc.contains("tolerances")) {
    for (const auto& [key, value] : doc.at("tolerances").items()) {
      if (!verify::find_check(key)) detail::fail("tolerance override for unknown check '" + key + "'");
      cfg.tolerances[key] = value.get<double>();
    }
  }

  cfg.jet_order = doc.value("jet_order", 4);
  if (cfg.jet_order < 3 || cfg.jet_order > 8) detail::fail("jet_order must be between 3 and 8");

  if (doc.contains("geodesic")) {
    const json& g = doc.at("geodesic");
    GeodesicJob job;
    job.x0 = g.at("x0").get<std::vector<double>>();
    job.y0 = g.at("y0").get<std::vector<double>>();
    job.t_end = g.value("t_end", 1.0);
    if (static_cast<int>(job.x0.size()) != cfg.n || static_cast<int>(job.y0.size()) != cfg.n)
      detail::fail("geodesic.x0 / geodesic.y0 must have n entries");
    if (!(job.t_end > 0.0)) detail::fail("geodesic.t_end must be positive");
    cfg.geodesic = std::move(job);
  }

  cfg.hash = fnv1a_hex(doc.dump());
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

inline randers::RandersBundle make_bundle(const RunConfig& cfg) {
  if (const cat::CatalogEntry* entry = cat::find(cfg.instance)) return cat::make_bundle(*entry);
  MetricField base = make_metric(cfg.instance + ":base", cfg.n, cfg.base_metric);
  OneFormField form(cfg.n, cfg.one_form);
  return randers::make_bundle(std::move(base), std::move(form), cfg.instance);
}

// --- report serialization ---------------------------------------------------

inline json witness_json(const verify::Witness& w) {
  return json{{"x", w.point.x}, {"y", w.point.y}, {"residual", w.residual}};
}

inline json report_json(const std::vector<verify::ResidualReport>& reports, const RunConfig& cfg, bool with_meta) {
  json checks = json::array();
  for (const verify::ResidualReport& r : reports) {
    checks.push_back(json{{"id", r.check_id},
                          {"points", r.points_evaluated},
                          {"skipped", r.points_skipped},
                          {"tolerance", r.tolerance},
                          {"max", r.max_residual},
                          {"mean", r.mean_residual},
                          {"pass", r.pass},
                          {"witness", witness_json(r.witness)}});
  }
  json out{{"config_hash", cfg.hash}, {"instance", cfg.instance}, {"checks", checks}};
  if (with_meta) {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    out["meta"] = json{{"generated_at", buf}, {"tool", "finsler"}, {"version", "0.1.0"}};
  }
  return out;
}

inline json tensor_json(const Tensor<Jet>& t) {
  const int n = t.extent();
  const int rank = t.rank();
  std::function<json(std::size_t, int)> build = [&](std::size_t offset, int depth) -> json {
    if (depth == rank) return t.data()[offset].value();
    std::size_t stride = 1;
    for (int r = depth + 1; r < rank; ++r) stride *= static_cast<std::size_t>(n);
    json arr = json::array();
    for (int i = 0; i < n; ++i) arr.push_back(build(offset + static_cast<std::size_t>(i) * stride, depth + 1));
    return arr;
  };
  if (rank == 0) return t.data()[0].value();
  return json{{"signature", t.signature_string()}, {"components", build(0, 0)}};
}

// Full dump of the frame and closed-form data at one point, for the `jet`
// command.
inline json point_dump(const randers::RandersBundle& bundle, const SlitPoint& p, int order) {
  verify::Workspace ws(bundle, p, order);
  const geom::Frame& f = ws.base();
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& s = ws.star();
  json frame{{"L", f.L.value()},
             {"det_g", f.det_g},
             {"g", tensor_json(f.g)},
             {"g_inv", tensor_json(f.g_inv)},
             {"ell_lo", tensor_json(f.ell_lo)},
             {"ell_up", tensor_json(f.ell_up)},
             {"h", tensor_json(f.h)},
             {"C_lll", tensor_json(f.C_lll)},
             {"C_mix", tensor_json(f.C_mix)},
             {"C_trace", tensor_json(f.C_tr)},
             {"G", tensor_json(f.G)},
             {"N", tensor_json(f.N)},
             {"Gamma_bar", tensor_json(f.Gbar)},
             {"Gamma", tensor_json(f.Gamma)},
             {"S_audit", tensor_json(f.S_audit)}};
  json star{{"L_star", q.Lstar.value()},
            {"alpha", q.alpha.value()},
            {"tau", q.tau.value()},
            {"mu", q.mu.value()},
            {"b2", q.b2.value()},
            {"ell_star_lo", tensor_json(q.ell_star_lo)},
            {"h_star", tensor_json(q.h_star)},
            {"g_star", tensor_json(q.g_star)},
            {"g_star_inv", tensor_json(q.g_star_inv)},
            {"m_bar", tensor_json(q.m_bar)},
            {"nu", tensor_json(q.nu)},
            {"phi", tensor_json(q.phi)},
            {"phi_star", tensor_json(q.phi_star)},
            {"omega", tensor_json(q.b_lo)},
            {"A", tensor_json(q.A_mix)},
            {"A_star", tensor_json(q.A_star_lll)},
            {"C_star_mix", tensor_json(q.C_star_mix)},
            {"C_star_trace", tensor_json(q.C_star_tr)},
            {"T_star", tensor_json(q.T_star_lll)},
            {"b_ij", tensor_json(q.b_ij)},
            {"b_sym", tensor_json(q.b_sym)},
            {"b_skew", tensor_json(q.b_skew)},
            {"b_i0", tensor_json(q.b_i0)},
            {"b_00", q.b_00.value()},
            {"N0", tensor_json(q.N0)},
            {"N_diff", tensor_json(q.N_mix)},
            {"B_diff", tensor_json(q.B_mix)},
            {"eq15_residual", randers::eq15_residual(f, q)}};
  json engine_star{{"L", s.L.value()}, {"g", tensor_json(s.g)}, {"N", tensor_json(s.N)}, {"C_trace", tensor_json(s.C_tr)}};
  return json{{"instance", bundle.star.id},
              {"x", p.x},
              {"y", p.y},
              {"jet_order", order},
              {"frame", frame},
              {"star_closed_form", star},
              {"star_engine", engine_star}};
}

}  // namespace finsler::config
