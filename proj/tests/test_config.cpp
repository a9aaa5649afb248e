// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <string>

#include "finsler/config.hpp"

using namespace finsler;
using config::json;

namespace {

json minimal() {
  return json{{"dimension", 2},
              {"instance", "euclid_const_b"},
              {"sample", json{{"count", 100}, {"seed", 42}}}};
}

}  // namespace

TEST_CASE("minimal catalog configuration") {
  config::RunConfig cfg = config::parse_config(minimal());
  REQUIRE(cfg.n == 2);
  REQUIRE(cfg.instance == "euclid_const_b");
  REQUIRE(cfg.plan.count == 100);
  REQUIRE(cfg.plan.seed == 42);
  REQUIRE(cfg.plan.x_box.size() == 2);         // inherited from the catalog
  REQUIRE(cfg.checks.size() >= 18);            // default suite
  REQUIRE_FALSE(cfg.geodesic.has_value());
  REQUIRE(cfg.hash.size() == 16);
}

TEST_CASE("custom instances parse their expressions eagerly") {
  json doc = minimal();
  doc.erase("instance");
  doc["base_metric"] = "sqrt(y1^2+y2^2)";
  doc["one_form"] = {"0.1*x1", "0"};
  config::RunConfig cfg = config::parse_config(doc);
  randers::RandersBundle bundle = config::make_bundle(cfg);
  REQUIRE(bundle.base.n == 2);

  doc["one_form"] = {"x7", "0"};
  try {
    config::parse_config(doc);
    FAIL("expected a config error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::config);
    REQUIRE(std::string(e.what()).find("one_form[0]") != std::string::npos);
  }
}

TEST_CASE("seed is mandatory") {
  json doc = minimal();
  doc["sample"].erase("seed");
  try {
    config::parse_config(doc);
    FAIL("expected a config error");
  } catch (const Error& e) {
    REQUIRE(std::string(e.what()).find("seed required") != std::string::npos);
  }
}

TEST_CASE("dimension bounds") {
  json doc = minimal();
  doc["dimension"] = 1;
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
  doc["dimension"] = 7;
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
  doc.erase("dimension");
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
}

TEST_CASE("check list resolution") {
  json doc = minimal();
  doc["checks"] = {"eq12_star_metric", "lemma5_trace"};
  config::RunConfig cfg = config::parse_config(doc);
  REQUIRE(cfg.checks == std::vector<std::string>{"eq12_star_metric", "lemma5_trace"});
  doc["checks"] = {"default"};
  REQUIRE(config::parse_config(doc).checks.size() >= 18);
  doc["checks"] = {"made_up"};
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
  doc["checks"] = json::array();
  REQUIRE(config::parse_config(doc).checks.empty());
}

TEST_CASE("tolerance overrides must name known checks") {
  json doc = minimal();
  doc["tolerances"] = {{"eq12_star_metric", 1e-7}};
  config::RunConfig cfg = config::parse_config(doc);
  REQUIRE(cfg.tolerances.at("eq12_star_metric") == Catch::Approx(1e-7));
  doc["tolerances"] = {{"unknown", 1e-7}};
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
}

TEST_CASE("geodesic job validation") {
  json doc = minimal();
  doc["geodesic"] = {{"x0", {0.0, 0.0}}, {"y0", {0.0, 1.0}}, {"t_end", 1.0}};
  config::RunConfig cfg = config::parse_config(doc);
  REQUIRE(cfg.geodesic.has_value());
  REQUIRE(cfg.geodesic->t_end == Catch::Approx(1.0));
  doc["geodesic"]["x0"] = {0.0};
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
  doc["geodesic"]["x0"] = {0.0, 0.0};
  doc["geodesic"]["t_end"] = -1.0;
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
}

TEST_CASE("content hash is canonical") {
  json a = minimal();
  json b = minimal();
  REQUIRE(config::parse_config(a).hash == config::parse_config(b).hash);
  b["sample"]["seed"] = 43;
  REQUIRE(config::parse_config(a).hash != config::parse_config(b).hash);
}

TEST_CASE("report serialization shape and determinism flags") {
  config::RunConfig cfg = config::parse_config(minimal());
  randers::RandersBundle bundle = config::make_bundle(cfg);
  verify::SamplePlan plan = cfg.plan;
  plan.count = 5;
  auto reports = verify::run_checks({"eq12_star_metric", "lemma5_trace"}, bundle, plan);
  json with_meta = config::report_json(reports, cfg, true);
  json bare = config::report_json(reports, cfg, false);
  REQUIRE(with_meta.contains("meta"));
  REQUIRE_FALSE(bare.contains("meta"));
  REQUIRE(bare["config_hash"] == cfg.hash);
  REQUIRE(bare["instance"] == "euclid_const_b");
  REQUIRE(bare["checks"].size() == 2);
  const json& c0 = bare["checks"][0];
  for (const char* key : {"id", "points", "skipped", "tolerance", "max", "mean", "pass", "witness"})
    REQUIRE(c0.contains(key));
  REQUIRE(c0["witness"].contains("x"));
  // stripping the meta block makes two dumps byte-identical
  json again = config::report_json(reports, cfg, true);
  again.erase("meta");
  json first = with_meta;
  first.erase("meta");
  REQUIRE(first.dump() == again.dump());
}

TEST_CASE("invalid sample boxes are rejected") {
  json doc = minimal();
  doc["sample"]["x_box"] = {{1.0, -1.0}, {-1.0, 1.0}};
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
  doc["sample"]["x_box"] = {{-1.0, 1.0}};
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
}

TEST_CASE("unknown instance is a config error") {
  json doc = minimal();
  doc["instance"] = "missing";
  REQUIRE_THROWS_AS(config::parse_config(doc), Error);
}
