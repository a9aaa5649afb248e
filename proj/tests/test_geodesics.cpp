// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "finsler/catalog.hpp"
#include "finsler/geodesics.hpp"

using namespace finsler;

namespace {

// Independent oracle for the conformal instance: fixed-step classical RK4 on
// the geodesic system with the hand-derived symbols of exp(2 x1) delta,
//   x1'' + (x1')^2 - (x2')^2 = 0,   x2'' + 2 x1' x2' = 0.
std::vector<double> rk4_conformal(std::vector<double> z, double t_end, int steps) {
  auto f = [](const std::vector<double>& s) {
    double x1d = s[2], x2d = s[3];
    return std::vector<double>{x1d, x2d, -(x1d * x1d - x2d * x2d), -2.0 * x1d * x2d};
  };
  double h = t_end / steps;
  for (int k = 0; k < steps; ++k) {
    auto k1 = f(z);
    std::vector<double> tmp(4);
    for (int i = 0; i < 4; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
    auto k2 = f(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
    auto k3 = f(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = z[i] + h * k3[i];
    auto k4 = f(tmp);
    for (int i = 0; i < 4; ++i) z[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return z;
}

}  // namespace

TEST_CASE("euclidean geodesics are straight lines") {
  randers::RandersBundle b = cat::make_bundle("euclid_flat");
  geod::GeodesicTrace tr = geod::integrate_geodesic(b.base, {0, 0}, {1, 0}, 1.0);
  std::size_t last = tr.samples() - 1;
  REQUIRE(tr.t[last] == Catch::Approx(1.0));
  REQUIRE(std::abs(tr.xs(last)[0] - 1.0) < 1e-9);
  REQUIRE(std::abs(tr.xs(last)[1]) < 1e-9);
  REQUIRE(geod::conservation_drift(b.base, tr) < 1e-12);
}

TEST_CASE("constant perturbation leaves the straight lines untouched") {
  randers::RandersBundle b = cat::make_bundle("euclid_const_b");
  geod::GeodesicTrace tr = geod::integrate_geodesic(b.star, {0, 0}, {1, 0}, 1.0);
  std::size_t last = tr.samples() - 1;
  REQUIRE(std::abs(tr.xs(last)[0] - 1.0) < 1e-9);
  REQUIRE(std::abs(tr.xs(last)[1]) < 1e-9);
  geod::PathComparison cmp = geod::compare_geodesics(b, {0.1, -0.2}, {0.8, 0.6}, 1.0);
  REQUIRE(cmp.max_deviation < 1e-7);
}

TEST_CASE("conformal geodesics match the independent fixed-step oracle") {
  randers::RandersBundle b = cat::make_bundle("conformal_const_b");
  std::vector<double> x0{0.1, -0.1}, y0{0.4, 0.5};
  double t_end = 1.0;
  geod::GeodesicTrace tr = geod::integrate_geodesic(b.base, x0, y0, t_end);
  std::vector<double> oracle = rk4_conformal({x0[0], x0[1], y0[0], y0[1]}, t_end, 10 * static_cast<int>(tr.stats.steps));
  std::size_t last = tr.samples() - 1;
  REQUIRE(std::abs(tr.xs(last)[0] - oracle[0]) < 1e-6);
  REQUIRE(std::abs(tr.xs(last)[1] - oracle[1]) < 1e-6);
  REQUIRE(std::abs(tr.ys(last)[0] - oracle[2]) < 1e-6);
  REQUIRE(std::abs(tr.ys(last)[1] - oracle[3]) < 1e-6);
}

TEST_CASE("the metric is conserved along its own geodesic flow") {
  for (const char* id : {"conformal_const_b", "euclid_curl_b", "euclid_closed_b", "hyperbolic_const_b"}) {
    randers::RandersBundle b = cat::make_bundle(id);
    geod::GeodesicTrace base = geod::integrate_geodesic(b.base, {0.1, 0.05}, {0.7, 0.3}, 1.0);
    geod::GeodesicTrace star = geod::integrate_geodesic(b.star, {0.1, 0.05}, {0.7, 0.3}, 1.0);
    INFO(id);
    REQUIRE(geod::conservation_drift(b.base, base) < 1e-6);
    REQUIRE(geod::conservation_drift(b.star, star) < 1e-6);
  }
}

TEST_CASE("halving the fixed step shrinks the error by at least a factor of four") {
  randers::RandersBundle b = cat::make_bundle("conformal_const_b");
  std::vector<double> x0{0.0, 0.0}, y0{0.6, 0.45};
  double t_end = 1.0;
  std::vector<double> ref = rk4_conformal({x0[0], x0[1], y0[0], y0[1]}, t_end, 20000);
  auto endpoint_err = [&](double h) {
    geod::IntegratorConfig cfg;
    cfg.fixed_step = h;
    geod::GeodesicTrace tr = geod::integrate_geodesic(b.base, x0, y0, t_end, cfg);
    std::size_t last = tr.samples() - 1;
    double dx0 = tr.xs(last)[0] - ref[0], dx1 = tr.xs(last)[1] - ref[1];
    return std::sqrt(dx0 * dx0 + dx1 * dx1);
  };
  double coarse = endpoint_err(0.1);
  double fine = endpoint_err(0.05);
  REQUIRE(coarse > 1e-12);  // above the roundoff floor, so the ratio is meaningful
  REQUIRE(coarse / fine >= 4.0);
}

TEST_CASE("tightening the adaptive tolerance reduces the deviation from the oracle") {
  randers::RandersBundle b = cat::make_bundle("conformal_const_b");
  std::vector<double> x0{0.05, -0.1}, y0{0.5, 0.4};
  std::vector<double> ref = rk4_conformal({x0[0], x0[1], y0[0], y0[1]}, 1.0, 20000);
  auto err_at = [&](double rtol) {
    geod::IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-3;
    geod::GeodesicTrace tr = geod::integrate_geodesic(b.base, x0, y0, 1.0, cfg);
    std::size_t last = tr.samples() - 1;
    double dx0 = tr.xs(last)[0] - ref[0], dx1 = tr.xs(last)[1] - ref[1];
    return std::sqrt(dx0 * dx0 + dx1 * dx1);
  };
  REQUIRE(err_at(1e-10) <= err_at(1e-5));
}

TEST_CASE("closedness defect of the catalog forms") {
  std::vector<std::array<double, 2>> box{{-1.0, 1.0}, {-1.0, 1.0}};
  OneFormField exact(2, {"0.5*cos(x1)", "0"});
  REQUIRE(geod::dJ_alpha_closedness(exact, box, 50, 3) < 1e-12);
  OneFormField curl(2, {"-0.1*x2", "0.1*x1"});
  REQUIRE(geod::dJ_alpha_closedness(curl, box, 50, 3) == Catch::Approx(0.2));
  OneFormField constant(2, {"0.1", "0"});
  REQUIRE(geod::dJ_alpha_closedness(constant, box, 50, 3) < 1e-15);
}

TEST_CASE("closed perturbation: identical unparametrized paths") {
  randers::RandersBundle b = cat::make_bundle("euclid_closed_b");
  verify::Sampler rng(2024);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x0{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    std::vector<double> dir = rng.sphere_direction(2);
    geod::PathComparison cmp = geod::compare_geodesics(b, x0, dir, 1.0);
    INFO("start " << x0[0] << "," << x0[1] << " dir " << dir[0] << "," << dir[1]);
    REQUIRE(cmp.max_deviation < 1e-6);
  }
}

TEST_CASE("non-closed perturbation: the paths separate") {
  randers::RandersBundle b = cat::make_bundle("euclid_curl_b");
  verify::Sampler rng(99);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x0{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    std::vector<double> dir = rng.sphere_direction(2);
    geod::PathComparison cmp = geod::compare_geodesics(b, x0, dir, 1.0);
    worst = std::max(worst, cmp.max_deviation);
  }
  REQUIRE(worst > 1e-3);
}

TEST_CASE("integration guards") {
  randers::RandersBundle b = cat::make_bundle("euclid_flat");
  geod::IntegratorConfig cfg;
  cfg.domain = {{-0.5, 0.5}, {-0.5, 0.5}};
  REQUIRE_THROWS_AS(geod::integrate_geodesic(b.base, {0, 0}, {1, 0}, 1.0, cfg), Error);
  geod::IntegratorConfig tiny;
  tiny.max_steps = 3;
  REQUIRE_THROWS_AS(geod::integrate_geodesic(b.base, {0, 0}, {1, 0}, 1.0, tiny), Error);
  REQUIRE_THROWS_AS(geod::integrate_geodesic(b.base, {0, 0}, {1, 0}, -1.0), Error);
}

TEST_CASE("trace export carries the full state") {
  randers::RandersBundle b = cat::make_bundle("euclid_flat");
  geod::GeodesicTrace tr = geod::integrate_geodesic(b.base, {0, 0}, {0.3, 0.4}, 1.0);
  REQUIRE(tr.samples() >= 2);
  for (std::size_t i = 0; i < tr.samples(); ++i) {
    REQUIRE(tr.ys(i)[0] == Catch::Approx(0.3).margin(1e-9));
    REQUIRE(tr.ys(i)[1] == Catch::Approx(0.4).margin(1e-9));
  }
}
