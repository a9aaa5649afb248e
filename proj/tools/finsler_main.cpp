// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: residual verification runs, single-point tensor
// dumps, geodesic comparisons, and the instance catalog.
//
// Exit codes: 0 success, 1 at least one check failed, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/finsler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_vector(const std::string& csv, int n, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t next = csv.find(',', pos);
    std::string tok = csv.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw finsler::Error(finsler::ErrorKind::config, std::string("cannot parse ") + what + " component '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (static_cast<int>(out.size()) != n)
    throw finsler::Error(finsler::ErrorKind::config, std::string(what) + " needs exactly n components");
  return out;
}

int cmd_verify(const std::string& config_path, const std::string& out_path, bool no_meta) {
  using namespace finsler;
  config::RunConfig cfg = config::load_config(config_path);
  randers::RandersBundle bundle = config::make_bundle(cfg);
  verify::RunOptions opts;
  opts.jet_order = cfg.jet_order;
  opts.tol_overrides = cfg.tolerances;
  std::vector<verify::ResidualReport> reports = verify::run_checks(cfg.checks, bundle, cfg.plan, opts);
  config::json doc = config::report_json(reports, cfg, !no_meta);
  std::string payload = doc.dump(2);
  payload += "\n";
  if (out_path.empty()) {
    std::fputs(payload.c_str(), stdout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::config, "cannot open report output '" + out_path + "'");
    out << payload;
  }
  int failed = 0;
  for (const auto& r : reports) {
    std::fprintf(stderr, "%-26s %-22s max %.3e mean %.3e  %s\n", r.check_id.c_str(), r.instance.c_str(), r.max_residual,
                 r.mean_residual, r.pass ? "pass" : "FAIL");
    if (!r.pass) ++failed;
  }
  std::fprintf(stderr, "%d/%zu checks passed\n", static_cast<int>(reports.size()) - failed, reports.size());
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_jet(const std::string& config_path, const std::string& xs, const std::string& ys) {
  using namespace finsler;
  config::RunConfig cfg = config::load_config(config_path);
  randers::RandersBundle bundle = config::make_bundle(cfg);
  SlitPoint p(parse_vector(xs, cfg.n, "--x"), parse_vector(ys, cfg.n, "--y"));
  if (!p.valid()) throw Error(ErrorKind::config, "the requested point must have y != 0");
  config::json doc = config::point_dump(bundle, p, cfg.jet_order);
  std::fputs(doc.dump(2).c_str(), stdout);
  std::fputs("\n", stdout);
  return kExitOk;
}

int cmd_geodesic(const std::string& config_path, const std::string& out_dir) {
  using namespace finsler;
  config::RunConfig cfg = config::load_config(config_path);
  if (!cfg.geodesic) throw Error(ErrorKind::config, "config has no 'geodesic' section");
  randers::RandersBundle bundle = config::make_bundle(cfg);
  std::filesystem::create_directories(out_dir);
  geod::GeodesicTrace base, star;
  geod::PathComparison cmp =
      geod::compare_geodesics(bundle, cfg.geodesic->x0, cfg.geodesic->y0, cfg.geodesic->t_end, {}, 256, &base, &star);
  geod::write_trace_csv(base, out_dir + "/base.csv");
  geod::write_trace_csv(star, out_dir + "/star.csv");
  config::json summary{{"instance", cfg.instance},
                       {"t_end", cfg.geodesic->t_end},
                       {"max_deviation", cmp.max_deviation},
                       {"common_length", cmp.common_length},
                       {"grid", cmp.grid},
                       {"base_steps", base.stats.steps},
                       {"star_steps", star.stats.steps},
                       {"base_conservation_drift", geod::conservation_drift(bundle.base, base)},
                       {"star_conservation_drift", geod::conservation_drift(bundle.star, star)}};
  std::ofstream out(out_dir + "/comparison.json");
  out << summary.dump(2) << "\n";
  std::printf("max deviation %.3e over common length %.6f (traces in %s)\n", cmp.max_deviation, cmp.common_length,
              out_dir.c_str());
  return kExitOk;
}

int cmd_catalog() {
  using namespace finsler;
  for (const cat::CatalogEntry& e : cat::entries()) {
    std::printf("%-20s n=%d  %s\n", e.id.c_str(), e.n, e.description.c_str());
    std::printf("%-20s base %s ; b = [", "", e.base_L.c_str());
    for (std::size_t i = 0; i < e.one_form.size(); ++i) std::printf("%s%s", i ? ", " : "", e.one_form[i].c_str());
    std::printf("]\n%-20s tags:%s%s%s%s%s\n", "", e.tags.closed ? " closed" : "", e.tags.parallel_b ? " parallel-b" : "",
                e.tags.flat ? " flat" : "", e.tags.berwald_base ? " berwald-base" : "",
                e.tags.landsberg_base ? " landsberg-base" : "");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler frame computations for a metric and its one-form perturbation"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir, xs, ys;
  bool no_meta = false;

  CLI::App* verify = app.add_subcommand("verify", "run residual checks and write a report");
  verify->add_option("--config", config_path, "config file (JSON)")->required();
  verify->add_option("--out", out_path, "report output path (default: stdout)");
  verify->add_flag("--no-meta", no_meta, "omit the timestamp/meta block from the report");

  CLI::App* jet = app.add_subcommand("jet", "dump every frame and perturbation quantity at one point");
  jet->add_option("--config", config_path, "config file (JSON)")->required();
  jet->add_option("--x", xs, "chart coordinates, comma separated")->required();
  jet->add_option("--y", ys, "tangent coordinates, comma separated")->required();

  CLI::App* geodesic = app.add_subcommand("geodesic", "integrate and compare base/starred geodesics");
  geodesic->add_option("--config", config_path, "config file (JSON)")->required();
  geodesic->add_option("--out-dir", out_dir, "output directory for traces and summary")->required();

  app.add_subcommand("catalog", "list the built-in instances and their tags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("verify")) return cmd_verify(config_path, out_path, no_meta);
    if (app.got_subcommand("jet")) return cmd_jet(config_path, xs, ys);
    if (app.got_subcommand("geodesic")) return cmd_geodesic(config_path, out_dir);
    if (app.got_subcommand("catalog")) return cmd_catalog();
  } catch (const finsler::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == finsler::ErrorKind::config || e.kind() == finsler::ErrorKind::syntax ? kExitConfig
                                                                                            : kExitCheckFailed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailed;
  }
  return kExitConfig;
}
