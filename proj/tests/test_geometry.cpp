// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "finsler/geometry.hpp"

using namespace finsler;

namespace {

MetricField euclid() { return make_metric("euclid", 2, "sqrt(y1^2+y2^2)"); }
MetricField randers01() { return make_metric("randers", 2, "sqrt(y1^2+y2^2)+0.1*y1"); }
MetricField conformal() { return make_metric("conformal", 2, "exp(x1)*sqrt(y1^2+y2^2)"); }
MetricField hyperbolic() { return make_metric("hyperbolic", 2, "sqrt(y1^2+exp(2*x1)*y2^2)"); }

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t s) : eng(s) {}
  double unif(double a, double b) { return a + (b - a) * (static_cast<double>(eng() >> 11) * 0x1.0p-53); }
  SlitPoint point() {
    double ang = unif(0, 2 * M_PI);
    double r = unif(0.5, 2.0);
    return SlitPoint({unif(-1, 1), unif(-1, 1)}, {r * std::cos(ang), r * std::sin(ang)});
  }
};

}  // namespace

TEST_CASE("fundamental tensor of the euclidean norm is the identity") {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    geom::Frame f = geom::make_frame(euclid(), rng.point(), 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) REQUIRE(f.g.at(i, j).value() == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-14));
  }
}

TEST_CASE("fundamental tensor of the perturbed norm matches the hand Hessian") {
  geom::Frame f = geom::make_frame(randers01(), SlitPoint({0, 0}, {0, 1}), 3);
  REQUIRE(f.g.at(0, 0).value() == Catch::Approx(1.01));
  REQUIRE(f.g.at(0, 1).value() == Catch::Approx(0.1));
  REQUIRE(f.g.at(1, 0).value() == Catch::Approx(0.1));
  REQUIRE(f.g.at(1, 1).value() == Catch::Approx(1.0));
  // ell* = (0.1, 1)
  REQUIRE(f.ell_lo.at(0).value() == Catch::Approx(0.1));
  REQUIRE(f.ell_lo.at(1).value() == Catch::Approx(1.0));
}

TEST_CASE("conformal factor one gives the identity metric") {
  geom::Frame f = geom::make_frame(conformal(), SlitPoint({0, 0.7}, {0.6, -0.8}), 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) REQUIRE(f.g.at(i, j).value() == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-14));
}

TEST_CASE("angular metric annihilates the radial direction") {
  Rng rng(12);
  for (int rep = 0; rep < 5; ++rep) {
    SlitPoint p = rng.point();
    geom::Frame f = geom::make_frame(randers01(), p, 3);
    for (int i = 0; i < 2; ++i) {
      double hy = 0;
      for (int j = 0; j < 2; ++j) hy += f.h.at(i, j).value() * p.y[static_cast<std::size_t>(j)];
      REQUIRE(std::abs(hy) < 1e-12);
    }
    double ll = 0;
    for (int i = 0; i < 2; ++i) ll += f.ell_lo.at(i).value() * f.ell_up.at(i).value();
    REQUIRE(ll == Catch::Approx(1.0));
  }
  geom::Frame fe = geom::make_frame(euclid(), SlitPoint({0, 0}, {0, 1}), 3);
  REQUIRE(fe.ell_lo.at(0).value() == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(fe.ell_lo.at(1).value() == Catch::Approx(1.0));
  REQUIRE(fe.h.at(0, 0).value() == Catch::Approx(1.0));
  REQUIRE(fe.h.at(1, 1).value() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("torsion vanishes for riemannian metrics and scales with degree -1") {
  Rng rng(13);
  SlitPoint p = rng.point();
  geom::Frame f = geom::make_frame(conformal(), p, 4);
  REQUIRE(max_abs(f.C_lll) < 1e-13);

  geom::Frame fr = geom::make_frame(randers01(), p, 4);
  SlitPoint p2 = p;
  for (double& c : p2.y) c *= 2.0;
  geom::Frame fr2 = geom::make_frame(randers01(), p2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        REQUIRE(fr2.C_lll.at(i, j, k).value() == Catch::Approx(0.5 * fr.C_lll.at(i, j, k).value()).margin(1e-12));

  // trace of the perturbed euclidean norm at y = (0, 1)
  geom::Frame ft = geom::make_frame(randers01(), SlitPoint({0, 0}, {0, 1}), 4);
  REQUIRE(ft.C_tr.at(0).value() == Catch::Approx(0.15));
  REQUIRE(ft.C_tr.at(1).value() == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("spray of the euclidean norm vanishes; constant perturbation keeps it flat") {
  auto G = geom::spray(euclid(), {0.2, -0.3}, {0.7, 0.4});
  REQUIRE(std::abs(G[0]) < 1e-14);
  REQUIRE(std::abs(G[1]) < 1e-14);
  auto Gs = geom::spray(randers01(), {0.2, -0.3}, {0.7, 0.4});
  REQUIRE(std::abs(Gs[0]) < 1e-10);
  REQUIRE(std::abs(Gs[1]) < 1e-10);
}

TEST_CASE("conformal spray matches the hand Christoffel symbols") {
  // a = exp(2 x1) delta: nonzero symbols are G111 = 1, G122 = -1, G212 = 1.
  Rng rng(14);
  for (int rep = 0; rep < 5; ++rep) {
    SlitPoint p = rng.point();
    auto G = geom::spray(conformal(), p.x, p.y);
    double y1 = p.y[0], y2 = p.y[1];
    REQUIRE(G[0] == Catch::Approx(0.5 * (y1 * y1 - y2 * y2)).margin(1e-12));
    REQUIRE(G[1] == Catch::Approx(y1 * y2).margin(1e-12));
    geom::Frame f = geom::make_frame(conformal(), p, 4);
    REQUIRE(f.Gbar.at(0, 0, 0).value() == Catch::Approx(1.0));
    REQUIRE(f.Gbar.at(0, 1, 1).value() == Catch::Approx(-1.0));
    REQUIRE(f.Gbar.at(1, 0, 1).value() == Catch::Approx(1.0));
    REQUIRE(f.Gbar.at(1, 0, 0).value() == Catch::Approx(0.0).margin(1e-13));
    REQUIRE(f.Gbar.at(1, 1, 1).value() == Catch::Approx(0.0).margin(1e-13));
  }
}

TEST_CASE("connection axioms hold on random points") {
  Rng rng(15);
  for (const MetricField& m : {euclid(), randers01(), conformal(), hyperbolic()}) {
    for (int rep = 0; rep < 25; ++rep) {
      SlitPoint p = rng.point();
      if (m.id == "hyperbolic") {
        p.x[0] *= 0.5;
        p.x[1] *= 0.5;
      }
      geom::Frame f = geom::make_frame(m, p, 4);
      REQUIRE(max_abs(geom::hcov(f, f.g)) < 1e-9);
      REQUIRE(max_abs(geom::vcov(f, f.g)) < 1e-11);
      REQUIRE(max_abs(f.S_audit) < 1e-12);
      for (int h = 0; h < 2; ++h) {
        double ny = 0;
        for (int j = 0; j < 2; ++j) ny += f.N.at(h, j).value() * p.y[static_cast<std::size_t>(j)];
        REQUIRE(ny == Catch::Approx(2.0 * f.G.at(h).value()).margin(1e-11));
        for (int i = 0; i < 2; ++i) {
          double gy = 0;
          for (int j = 0; j < 2; ++j) gy += f.Gbar.at(h, i, j).value() * p.y[static_cast<std::size_t>(j)];
          REQUIRE(gy == Catch::Approx(f.N.at(h, i).value()).margin(1e-11));
        }
      }
    }
  }
}

TEST_CASE("vertical covariant derivative identities") {
  Rng rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    SlitPoint p = rng.point();
    geom::Frame f = geom::make_frame(euclid(), p, 4);
    Tensor<Jet> dL = geom::vcov(f, geom::scalar_tensor(f.L));
    for (int i = 0; i < 2; ++i) REQUIRE(std::abs(dL.at(i).value() - f.ell_lo.at(i).value()) < 1e-10);
    Tensor<Jet> constant = geom::scalar_tensor(Jet::constant(f.space, 2.5, f.order));
    REQUIRE(max_abs(geom::vcov(f, constant)) < 1e-15);
    Tensor<Jet> dh = geom::vcov(f, f.h);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int d = 0; d < 2; ++d) {
          double want = -(f.h.at(d, i).value() * f.ell_lo.at(j).value() + f.h.at(d, j).value() * f.ell_lo.at(i).value()) /
                        f.L.value();
          REQUIRE(dh.at(i, j, d).value() == Catch::Approx(want).margin(1e-11));
        }
  }
}

TEST_CASE("horizontal covariant derivative identities") {
  Rng rng(17);
  for (const MetricField& m : {euclid(), randers01(), conformal()}) {
    SlitPoint p = rng.point();
    geom::Frame f = geom::make_frame(m, p, 4);
    REQUIRE(max_abs(geom::hcov(f, geom::scalar_tensor(f.L))) < 1e-11);
    REQUIRE(max_abs(geom::hcov(f, f.ell_lo)) < 1e-11);
    REQUIRE(max_abs(geom::hcov(f, f.h)) < 1e-10);
  }
  // on the flat frame the horizontal derivative of an x-polynomial is the
  // plain partial derivative
  geom::Frame f = geom::make_frame(euclid(), SlitPoint({0.4, -0.2}, {0.6, 0.8}), 4);
  Jet field = f.X[0] * f.X[0] * f.X[1];  // x1^2 x2
  Tensor<Jet> df = geom::hcov(f, geom::scalar_tensor(field));
  REQUIRE(df.at(0).value() == Catch::Approx(2 * 0.4 * -0.2));
  REQUIRE(df.at(1).value() == Catch::Approx(0.4 * 0.4));
}

TEST_CASE("curvature vanishes on flat instances") {
  Rng rng(18);
  SlitPoint p = rng.point();
  geom::Frame fe = geom::make_frame(euclid(), p, 4);
  REQUIRE(max_abs(fe.R()) < 1e-13);
  REQUIRE(max_abs(fe.P()) < 1e-13);
  REQUIRE(max_abs(fe.Q()) < 1e-13);
  // locally Minkowskian star metric: flat + constant perturbation
  geom::Frame fr = geom::make_frame(randers01(), p, 4);
  REQUIRE(max_abs(fr.R()) < 1e-11);
  REQUIRE(max_abs(fr.P()) < 1e-11);
  // conformal factor exp(x1) in two dimensions is curvature-flat as well,
  // with nonvanishing connection, so the cancellation is nontrivial
  geom::Frame fc = geom::make_frame(conformal(), p, 4);
  REQUIRE(max_abs(fc.R()) < 1e-10);
}

TEST_CASE("riemannian reduction reproduces the closed-form curvature of the hyperbolic plane") {
  // a = diag(1, exp(2 x1)); with the convention R(X, Y) = nabla_Y nabla_X -
  // nabla_X nabla_Y + nabla_[X,Y] the nonzero components are the negatives
  // of the textbook Levi-Civita values.
  Rng rng(19);
  for (int rep = 0; rep < 6; ++rep) {
    SlitPoint p = rng.point();
    p.x[0] *= 0.5;
    p.x[1] *= 0.5;
    double e2x = std::exp(2.0 * p.x[0]);
    geom::Frame f = geom::make_frame(hyperbolic(), p, 4);
    Tensor<double> want(2, {Slot::up, Slot::lo, Slot::lo, Slot::lo});
    want.at(0, 0, 1, 1) = e2x;
    want.at(0, 1, 0, 1) = -e2x;
    want.at(1, 0, 1, 0) = -1.0;
    want.at(1, 1, 0, 0) = 1.0;
    for (int h = 0; h < 2; ++h)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            REQUIRE(f.R().at(h, i, j, k).value() == Catch::Approx(want.at(h, i, j, k)).margin(1e-8));
    REQUIRE(max_abs(f.Q()) < 1e-12);
    REQUIRE(max_abs(f.P()) < 1e-10);
  }
}

TEST_CASE("curvature antisymmetry in the two direction slots") {
  Rng rng(20);
  SlitPoint p = rng.point();
  geom::Frame f = geom::make_frame(randers01(), p, 4);
  for (int h = 0; h < 2; ++h)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          REQUIRE(f.R().at(h, i, j, k).value() == Catch::Approx(-f.R().at(h, j, i, k).value()).margin(1e-12));
          REQUIRE(f.Q().at(h, i, j, k).value() == Catch::Approx(-f.Q().at(h, j, i, k).value()).margin(1e-12));
        }
}

TEST_CASE("curvature contractions with the fundamental section") {
  // R(., .)eta recovers (minus) the curvature of the nonlinear connection,
  // and P(X, Y)eta reduces to the Berwald/Cartan coefficient gap.
  Rng rng(27);
  MetricField m = make_metric("pert", 2, "sqrt(y1^2+exp(2*x1)*y2^2)+0.2*cos(x2)*y1");
  for (int rep = 0; rep < 4; ++rep) {
    SlitPoint p = rng.point();
    p.x[0] *= 0.5;
    p.x[1] *= 0.5;
    geom::Frame f = geom::make_frame(m, p, 4);
    for (int h = 0; h < 2; ++h)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double reta = 0.0, peta = 0.0;
          for (int k = 0; k < 2; ++k) {
            reta += f.R().at(h, i, j, k).value() * p.y[static_cast<std::size_t>(k)];
            peta += f.P().at(h, i, j, k).value() * p.y[static_cast<std::size_t>(k)];
          }
          REQUIRE(reta == Catch::Approx(-f.Rnl().at(h, i, j).value()).margin(1e-9));
          double gap = f.Gbar.at(h, j, i).value() - f.dy(f.N.at(h, j), i).value();
          REQUIRE(peta == Catch::Approx(gap).margin(1e-9));
          double qeta = 0.0;
          for (int k = 0; k < 2; ++k) qeta += f.Q().at(h, i, j, k).value() * p.y[static_cast<std::size_t>(k)];
          REQUIRE(std::abs(qeta) < 1e-10);
        }
  }
}

TEST_CASE("covariant derivatives satisfy the product rule") {
  Rng rng(28);
  MetricField m = make_metric("pert", 2, "sqrt(y1^2+y2^2)+0.1*cos(x1)*y1");
  SlitPoint p = rng.point();
  geom::Frame f = geom::make_frame(m, p, 4);
  // scalar times covector: D(f w) = Df (x) w + f Dw, for both derivatives
  Jet scalar = finsler::sin(f.X[0]) * f.L;
  Tensor<Jet> w = f.ell_lo;
  Tensor<Jet> fw(2, {Slot::lo});
  for (int i = 0; i < 2; ++i) fw.at(i) = scalar * w.at(i);
  Tensor<Jet> dsc_v = geom::vcov(f, geom::scalar_tensor(scalar));
  Tensor<Jet> dsc_h = geom::hcov(f, geom::scalar_tensor(scalar));
  Tensor<Jet> dw_v = geom::vcov(f, w);
  Tensor<Jet> dw_h = geom::hcov(f, w);
  Tensor<Jet> dfw_v = geom::vcov(f, fw);
  Tensor<Jet> dfw_h = geom::hcov(f, fw);
  for (int i = 0; i < 2; ++i)
    for (int d = 0; d < 2; ++d) {
      double want_v = dsc_v.at(d).value() * w.at(i).value() + scalar.value() * dw_v.at(i, d).value();
      double want_h = dsc_h.at(d).value() * w.at(i).value() + scalar.value() * dw_h.at(i, d).value();
      REQUIRE(dfw_v.at(i, d).value() == Catch::Approx(want_v).margin(1e-12));
      REQUIRE(dfw_h.at(i, d).value() == Catch::Approx(want_h).margin(1e-12));
    }
  // contraction commutes with the derivative: D(w(v)) = Dw(v) + w(Dv)
  Tensor<Jet> v = f.ell_up;
  Jet pairing(0.0);
  for (int i = 0; i < 2; ++i) pairing += w.at(i) * v.at(i);
  Tensor<Jet> dv_h = geom::hcov(f, v);
  Tensor<Jet> dpair = geom::hcov(f, geom::scalar_tensor(pairing));
  for (int d = 0; d < 2; ++d) {
    double want = 0.0;
    for (int i = 0; i < 2; ++i) want += dw_h.at(i, d).value() * v.at(i).value() + w.at(i).value() * dv_h.at(i, d).value();
    REQUIRE(dpair.at(d).value() == Catch::Approx(want).margin(1e-12));
  }
}

TEST_CASE("homogeneity degrees of the frame quantities") {
  Rng rng(21);
  SlitPoint p = rng.point();
  geom::Frame f = geom::make_frame(randers01(), p, 4);
  for (double lam : {0.5, 2.0, 3.0}) {
    SlitPoint q = p;
    for (double& c : q.y) c *= lam;
    geom::Frame fl = geom::make_frame(randers01(), q, 4);
    REQUIRE(fl.L.value() == Catch::Approx(lam * f.L.value()).epsilon(1e-12));
    for (int i = 0; i < 2; ++i) {
      REQUIRE(fl.G.at(i).value() == Catch::Approx(lam * lam * f.G.at(i).value()).margin(1e-10));
      for (int j = 0; j < 2; ++j) {
        REQUIRE(fl.g.at(i, j).value() == Catch::Approx(f.g.at(i, j).value()).margin(1e-12));
        REQUIRE(fl.N.at(i, j).value() == Catch::Approx(lam * f.N.at(i, j).value()).margin(1e-10));
      }
    }
  }
}

TEST_CASE("euler identities") {
  Rng rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    SlitPoint p = rng.point();
    geom::Frame f = geom::make_frame(randers01(), p, 4);
    double L = f.L.value();
    double gyy = 0;
    for (int i = 0; i < 2; ++i) {
      double gy = 0;
      for (int j = 0; j < 2; ++j) gy += f.g.at(i, j).value() * p.y[static_cast<std::size_t>(j)];
      gyy += gy * p.y[static_cast<std::size_t>(i)];
      REQUIRE(gy == Catch::Approx(L * f.ell_lo.at(i).value()).margin(1e-11));
      for (int j = 0; j < 2; ++j) {
        double cy = 0;
        for (int k = 0; k < 2; ++k) cy += f.C_lll.at(i, j, k).value() * p.y[static_cast<std::size_t>(k)];
        REQUIRE(std::abs(cy) < 1e-11);
      }
    }
    REQUIRE(gyy == Catch::Approx(L * L).epsilon(1e-11));
  }
}

TEST_CASE("degenerate metrics are reported as instance errors") {
  MetricField degenerate = make_metric("deg", 2, "sqrt(y1^2)");
  try {
    geom::make_frame(degenerate, SlitPoint({0, 0}, {1.0, 0.5}), 3);
    FAIL("expected an instance error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::instance);
  }
}

TEST_CASE("nonpositive metric values are rejected") {
  MetricField bad = make_metric("bad", 2, "y1");
  REQUIRE_THROWS_AS(geom::make_frame(bad, SlitPoint({0, 0}, {-1.0, 0.0}), 3), Error);
}

TEST_CASE("curvature needs jet order four") {
  geom::Frame f = geom::make_frame(randers01(), SlitPoint({0.1, 0.2}, {0.9, 0.1}), 3);
  try {
    (void)f.R();
    FAIL("expected a jet order error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::jet_order);
  }
}

TEST_CASE("frames reject invalid points") {
  REQUIRE_THROWS_AS(geom::make_frame(euclid(), SlitPoint({0, 0}, {0, 0}), 3), Error);
  REQUIRE_THROWS_AS(geom::make_frame(euclid(), SlitPoint({0}, {1}), 3), Error);
}
