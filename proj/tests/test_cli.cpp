// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line binary.  The test runner passes the
// binary location through FINSLER_BIN and a scratch directory through
// FINSLER_TMP.
#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "finsler/common.hpp"

namespace {

std::string env_or_fail(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE(v != nullptr);
  return v;
}

std::string bin() { return env_or_fail("FINSLER_BIN"); }
std::string tmp_dir() { return env_or_fail("FINSLER_TMP"); }

int run(const std::string& args, const std::string& stdout_to = "") {
  std::string cmd = bin() + " " + args;
  if (!stdout_to.empty()) cmd += " > " + stdout_to;
  cmd += " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string write_config(const std::string& name, const nlohmann::json& doc) {
  std::string path = tmp_dir() + "/" + name;
  std::ofstream out(path);
  out << doc.dump(2);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json base_config(const std::string& instance, int count = 15) {
  return nlohmann::json{{"dimension", 2}, {"instance", instance}, {"sample", {{"count", count}, {"seed", 42}}}};
}

}  // namespace

TEST_CASE("catalog lists the shipped instances") {
  std::string out = tmp_dir() + "/catalog.txt";
  REQUIRE(run("catalog", out) == 0);
  std::string text = slurp(out);
  int entries = 0;
  for (const char* id : {"euclid_flat", "euclid_const_b", "euclid_closed_b", "euclid_curl_b", "conformal_const_b",
                         "hyperbolic_const_b"})
    if (text.find(id) != std::string::npos) ++entries;
  REQUIRE(entries >= 5);
  REQUIRE(text.find("closed") != std::string::npos);
}

TEST_CASE("verify: default suite passes and reports every check") {
  std::string cfg = write_config("smoke.json", base_config("euclid_const_b"));
  std::string report_path = tmp_dir() + "/report.json";
  REQUIRE(run("verify --config " + cfg + " --out " + report_path) == 0);
  nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  REQUIRE(report["instance"] == "euclid_const_b");
  REQUIRE(report["checks"].size() >= 18);
  for (const auto& c : report["checks"]) REQUIRE(c["pass"].get<bool>());
}

TEST_CASE("verify: identical configs give byte-identical bare reports") {
  std::string cfg = write_config("det.json", base_config("conformal_const_b", 10));
  std::string r1 = tmp_dir() + "/det1.json", r2 = tmp_dir() + "/det2.json";
  REQUIRE(run("verify --config " + cfg + " --no-meta --out " + r1) == 0);
  REQUIRE(run("verify --config " + cfg + " --no-meta --out " + r2) == 0);
  REQUIRE(slurp(r1) == slurp(r2));
  REQUIRE(!slurp(r1).empty());
}

TEST_CASE("verify: a failing check yields exit code 1 and a witness") {
  nlohmann::json doc = base_config("euclid_curl_b", 10);
  doc["checks"] = {"theorem2_N_zero"};
  std::string cfg = write_config("curl.json", doc);
  std::string report_path = tmp_dir() + "/curl_report.json";
  REQUIRE(run("verify --config " + cfg + " --out " + report_path) == 1);
  nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  const auto& check = report["checks"][0];
  REQUIRE_FALSE(check["pass"].get<bool>());
  REQUIRE(check["max"].get<double>() > 1e-3);
  REQUIRE(check["witness"]["x"].size() == 2);
}

TEST_CASE("verify: empty check list still succeeds") {
  nlohmann::json doc = base_config("euclid_flat", 5);
  doc["checks"] = nlohmann::json::array();
  std::string cfg = write_config("empty.json", doc);
  std::string report_path = tmp_dir() + "/empty_report.json";
  REQUIRE(run("verify --config " + cfg + " --out " + report_path) == 0);
  nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  REQUIRE(report["checks"].empty());
}

TEST_CASE("configuration problems use exit code 2") {
  nlohmann::json doc = base_config("euclid_flat", 5);
  doc["sample"].erase("seed");
  std::string cfg = write_config("noseed.json", doc);
  REQUIRE(run("verify --config " + cfg) == 2);
  REQUIRE(run("verify --config " + tmp_dir() + "/does_not_exist.json") == 2);
  std::ofstream(tmp_dir() + "/broken.json") << "{ not json";
  REQUIRE(run("verify --config " + tmp_dir() + "/broken.json") == 2);
}

TEST_CASE("jet: the worked example block") {
  std::string cfg = write_config("jet.json", base_config("euclid_const_b", 5));
  std::string out = tmp_dir() + "/jet_dump.json";
  REQUIRE(run("jet --config " + cfg + " --x 0,0 --y 0,1", out) == 0);
  nlohmann::json dump = nlohmann::json::parse(slurp(out));
  auto gstar = dump["star_closed_form"]["g_star"]["components"];
  REQUIRE(gstar[0][0].get<double>() == Catch::Approx(1.01));
  REQUIRE(gstar[0][1].get<double>() == Catch::Approx(0.1));
  REQUIRE(gstar[1][1].get<double>() == Catch::Approx(1.0));
  REQUIRE(dump["frame"].contains("Gamma_bar"));
  REQUIRE(dump["star_closed_form"].contains("N_diff"));
}

TEST_CASE("geodesic: traces and summary land in the output directory") {
  nlohmann::json doc = base_config("euclid_closed_b", 5);
  doc["geodesic"] = {{"x0", {0.1, -0.2}}, {"y0", {0.8, 0.6}}, {"t_end", 1.0}};
  std::string cfg = write_config("geo.json", doc);
  std::string out_dir = tmp_dir() + "/geo_out";
  REQUIRE(run("geodesic --config " + cfg + " --out-dir " + out_dir, tmp_dir() + "/geo.txt") == 0);
  std::string base_csv = slurp(out_dir + "/base.csv");
  REQUIRE(base_csv.rfind("t,x1,x2,y1,y2\n", 0) == 0);
  REQUIRE(!slurp(out_dir + "/star.csv").empty());
  nlohmann::json summary = nlohmann::json::parse(slurp(out_dir + "/comparison.json"));
  REQUIRE(summary["max_deviation"].get<double>() < 1e-6);
  // a geodesic job is required for this command
  std::string cfg2 = write_config("geo_missing.json", base_config("euclid_flat", 5));
  REQUIRE(run("geodesic --config " + cfg2 + " --out-dir " + out_dir) == 2);
}
