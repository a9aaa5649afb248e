// SPDX-License-Identifier: Apache-2.0
//
// Residual checks: every closed-form relation between the base and the
// perturbed structure is evaluated over a seeded sample of slit points and
// reduced to one relative residual per point.  The registry below is the
// single source of the check ids, their tolerances, and the functions that
// evaluate them.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finsler/catalog.hpp"
#include "finsler/common.hpp"
#include "finsler/geometry.hpp"
#include "finsler/randers.hpp"
#include "finsler/tensor.hpp"

namespace finsler::verify {

struct SamplePlan {
  std::string instance;
  int count = 100;
  std::uint64_t seed = 0;
  std::vector<std::array<double, 2>> x_box;
  double y_scale_min = 0.5;
  double y_scale_max = 2.0;
};

struct CheckSpec {
  std::string id;
  double tolerance = 0.0;  // 0 = registry default
  std::string instance;
};

struct Witness {
  SlitPoint point;
  double residual = 0.0;
};

struct ResidualReport {
  std::string check_id;
  std::string instance;
  int points_evaluated = 0;
  int points_skipped = 0;
  double tolerance = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  bool pass = false;
  Witness witness;
};

// Deterministic sampling primitives on top of the (fully specified)
// mt19937_64 stream; the distribution transforms are hand-rolled so the
// values do not depend on the standard library implementation.
class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::vector<double> sphere_direction(int n) {
    for (;;) {
      std::vector<double> v(static_cast<std::size_t>(n));
      double norm2 = 0.0;
      for (double& c : v) {
        c = gauss();
        norm2 += c * c;
      }
      if (norm2 > 1e-12) {
        double inv = 1.0 / std::sqrt(norm2);
        for (double& c : v) c *= inv;
        return v;
      }
    }
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Cheap admissibility screen: positive L and L*, nondegenerate g, and the
// one-form norm within the working margin.
inline bool admissible(const randers::RandersBundle& bundle, const SlitPoint& p, std::string* why) {
  const int n = bundle.base.n;
  try {
    auto space = JetSpace::get(2 * n, 2);
    std::vector<Jet> X(static_cast<std::size_t>(n)), Y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      X[static_cast<std::size_t>(i)] = Jet::variable(space, p.x[static_cast<std::size_t>(i)], i, 2);
      Y[static_cast<std::size_t>(i)] = Jet::variable(space, p.y[static_cast<std::size_t>(i)], n + i, 2);
    }
    Jet L = bundle.base.L->eval(X, Y);
    if (!(L.value() > 0.0)) {
      if (why) *why = "base metric not positive";
      return false;
    }
    Jet L2 = L * L;
    std::vector<double> g(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<int> alpha(static_cast<std::size_t>(2 * n), 0);
        alpha[static_cast<std::size_t>(n + i)] += 1;
        alpha[static_cast<std::size_t>(n + j)] += 1;
        g[static_cast<std::size_t>(i * n + j)] = 0.5 * L2.partial(alpha);
      }
    // determinant + inverse (n <= 6, plain elimination)
    std::vector<double> a(g), inv(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(a[static_cast<std::size_t>(r * n + col)]) > std::abs(a[static_cast<std::size_t>(piv * n + col)])) piv = r;
      if (piv != col) {
        for (int j = 0; j < n; ++j) {
          std::swap(a[static_cast<std::size_t>(piv * n + j)], a[static_cast<std::size_t>(col * n + j)]);
          std::swap(inv[static_cast<std::size_t>(piv * n + j)], inv[static_cast<std::size_t>(col * n + j)]);
        }
        det = -det;
      }
      double d = a[static_cast<std::size_t>(col * n + col)];
      det *= d;
      if (std::abs(d) < geom::kDegenerateDet) {
        if (why) *why = "degenerate metric tensor";
        return false;
      }
      for (int j = 0; j < n; ++j) {
        a[static_cast<std::size_t>(col * n + j)] /= d;
        inv[static_cast<std::size_t>(col * n + j)] /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        double f = a[static_cast<std::size_t>(r * n + col)];
        for (int j = 0; j < n; ++j) {
          a[static_cast<std::size_t>(r * n + j)] -= f * a[static_cast<std::size_t>(col * n + j)];
          inv[static_cast<std::size_t>(r * n + j)] -= f * inv[static_cast<std::size_t>(col * n + j)];
        }
      }
    }
    if (std::abs(det) < geom::kDegenerateDet) {
      if (why) *why = "degenerate metric tensor";
      return false;
    }
    std::vector<double> b = bundle.form.eval(p.x, p.y);
    double b2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b2 += inv[static_cast<std::size_t>(i * n + j)] * b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    if (b2 > randers::kAdmissibleB2) {
      if (why) *why = "one-form norm above the admissibility margin";
      return false;
    }
    double alpha = 0.0;
    for (int i = 0; i < n; ++i) alpha += b[static_cast<std::size_t>(i)] * p.y[static_cast<std::size_t>(i)];
    if (!(L.value() + alpha > 0.0)) {
      if (why) *why = "perturbed metric not positive";
      return false;
    }
    return true;
  } catch (const Error& e) {
    if (why) *why = e.what();
    return false;
  }
}

struct DrawResult {
  std::vector<SlitPoint> points;
  int skipped = 0;
  std::vector<std::string> skip_log;
};

inline DrawResult draw_points(const SamplePlan& plan, const randers::RandersBundle& bundle) {
  if (plan.count < 1) throw Error(ErrorKind::config, "sample plan needs count >= 1");
  const int n = bundle.base.n;
  if (static_cast<int>(plan.x_box.size()) != n) throw Error(ErrorKind::config, "sample plan x-box does not match the dimension");
  Sampler rng(plan.seed);
  DrawResult out;
  for (int k = 0; k < plan.count; ++k) {
    SlitPoint p;
    p.x.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      p.x[static_cast<std::size_t>(i)] = rng.uniform(plan.x_box[static_cast<std::size_t>(i)][0], plan.x_box[static_cast<std::size_t>(i)][1]);
    p.y = rng.sphere_direction(n);
    double scale = std::exp(rng.uniform(std::log(plan.y_scale_min), std::log(plan.y_scale_max)));
    for (double& c : p.y) c *= scale;
    std::string why;
    if (admissible(bundle, p, &why)) {
      out.points.push_back(std::move(p));
    } else {
      ++out.skipped;
      out.skip_log.push_back(why);
    }
  }
  if (out.points.empty()) throw Error(ErrorKind::instance, "instance is inadmissible at every sampled point");
  return out;
}

// Per-point evaluation state shared by all checks, with the expensive parts
// (starred engine frame, closed forms, covariant derivatives) computed on
// first use.
class Workspace {
public:
  Workspace(const randers::RandersBundle& bundle, const SlitPoint& p, int order)
      : bundle_(&bundle), point_(p), order_(order), base_(geom::make_frame(bundle.base, p, order)) {}

  const randers::RandersBundle& bundle() const { return *bundle_; }
  const SlitPoint& point() const { return point_; }
  int order() const { return order_; }
  const geom::Frame& base() const { return base_; }

  const geom::Frame& star() {
    if (!star_) star_ = geom::make_frame(bundle_->star, point_, order_);
    return *star_;
  }

  const randers::StarQuantities& sq() {
    if (!sq_) sq_ = randers::make_star_quantities(base_, bundle_->form);
    return *sq_;
  }

  const randers::DirectDiff& diff() {
    if (!diff_) diff_ = randers::make_direct_diff(base_, star());
    return *diff_;
  }

  const Tensor<Jet>& hB() { return cache(hB_, [this] { return geom::hcov(base_, sq().B_mix); }); }
  const Tensor<Jet>& vB() { return cache(vB_, [this] { return geom::vcov(base_, sq().B_mix); }); }
  const Tensor<Jet>& hA() { return cache(hA_, [this] { return geom::hcov(base_, sq().A_mix); }); }
  const Tensor<Jet>& vA() { return cache(vA_, [this] { return geom::vcov(base_, sq().A_mix); }); }

  const Jet& Y(int i) const { return base_.Y[static_cast<std::size_t>(i)]; }

private:
  template <class F>
  const Tensor<Jet>& cache(std::optional<Tensor<Jet>>& slot, F&& make) {
    if (!slot) slot = make();
    return *slot;
  }

  const randers::RandersBundle* bundle_;
  SlitPoint point_;
  int order_;
  geom::Frame base_;
  std::optional<geom::Frame> star_;
  std::optional<randers::StarQuantities> sq_;
  std::optional<randers::DirectDiff> diff_;
  std::optional<Tensor<Jet>> hB_, vB_, hA_, vA_;
};

enum class CheckKind { invariant, identity, oracle, theorem };

struct CheckDef {
  std::string id;
  std::string summary;
  double tol;
  CheckKind kind;
  std::function<double(Workspace&)> fn;
};

namespace checks {

inline double norm_pair(double dev, double scale) { return dev / (1.0 + scale); }

// --- engine invariants -----------------------------------------------------

inline double euler_identities(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const int n = f.n;
  double dev = 0.0, scale = 1.0;
  double L = f.L.value();
  scale = std::max(scale, L * L);
  double gyy = 0.0;
  for (int i = 0; i < n; ++i) {
    double gy = 0.0, hy = 0.0;
    for (int j = 0; j < n; ++j) {
      gy += f.g.at(i, j).value() * f.site.y[static_cast<std::size_t>(j)];
      hy += f.h.at(i, j).value() * f.site.y[static_cast<std::size_t>(j)];
    }
    gyy += gy * f.site.y[static_cast<std::size_t>(i)];
    dev = std::max(dev, std::abs(gy - L * f.ell_lo.at(i).value()));
    dev = std::max(dev, std::abs(hy));
    for (int j = 0; j < n; ++j) {
      double cy = 0.0;
      for (int k = 0; k < n; ++k) cy += f.C_lll.at(i, j, k).value() * f.site.y[static_cast<std::size_t>(k)];
      dev = std::max(dev, std::abs(cy));
    }
  }
  dev = std::max(dev, std::abs(gyy - L * L));
  double ll = 0.0;
  for (int i = 0; i < n; ++i) ll += f.ell_lo.at(i).value() * f.ell_up.at(i).value();
  dev = std::max(dev, std::abs(ll - 1.0));
  return norm_pair(dev, scale);
}

inline double homogeneity(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const int n = f.n;
  double worst = 0.0;
  for (double lam : {0.5, 2.0, 3.0}) {
    SlitPoint q = f.site;
    for (double& c : q.y) c *= lam;
    geom::Frame fl = geom::make_frame(ws.bundle().base, q, 3);
    double dev = 0.0, scale = 1.0;
    auto cmp = [&](double a, double b) {
      dev = std::max(dev, std::abs(a - b));
      scale = std::max({scale, std::abs(a), std::abs(b)});
    };
    cmp(fl.L.value(), lam * f.L.value());
    for (int i = 0; i < n; ++i) {
      cmp(fl.G.at(i).value(), lam * lam * f.G.at(i).value());
      for (int j = 0; j < n; ++j) {
        cmp(fl.g.at(i, j).value(), f.g.at(i, j).value());
        cmp(fl.N.at(i, j).value(), lam * f.N.at(i, j).value());
        for (int k = 0; k < n; ++k) cmp(fl.C_lll.at(i, j, k).value(), f.C_lll.at(i, j, k).value() / lam);
      }
    }
    worst = std::max(worst, norm_pair(dev, scale));
  }
  return worst;
}

inline double cartan_axioms(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const int n = f.n;
  double dev = std::max(max_abs(geom::hcov(f, f.g)), max_abs(geom::vcov(f, f.g)));
  dev = std::max(dev, max_abs(f.S_audit));
  double scale = 1.0;
  for (int h = 0; h < n; ++h) {
    double ny = 0.0;
    for (int j = 0; j < n; ++j) ny += f.N.at(h, j).value() * f.site.y[static_cast<std::size_t>(j)];
    dev = std::max(dev, std::abs(ny - 2.0 * f.G.at(h).value()));
    scale = std::max(scale, std::abs(2.0 * f.G.at(h).value()));
    for (int i = 0; i < n; ++i) {
      double gy = 0.0;
      for (int j = 0; j < n; ++j) gy += f.Gbar.at(h, i, j).value() * f.site.y[static_cast<std::size_t>(j)];
      dev = std::max(dev, std::abs(gy - f.N.at(h, i).value()));
      scale = std::max(scale, std::abs(f.N.at(h, i).value()));
    }
  }
  return norm_pair(dev, scale);
}

// --- base-frame derivative identities ---------------------------------------

inline double lemma1a(Workspace& ws) {
  const geom::Frame& f = ws.base();
  Tensor<Jet> dL = geom::vcov(f, geom::scalar_tensor(f.L));
  return rel_residual(dL, f.ell_lo);
}

inline double lemma1b(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const int n = f.n;
  Tensor<Jet> dell = geom::vcov(f, f.ell_lo);
  Tensor<Jet> rhs(n, dell.signature());
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < n; ++d) rhs.at(i, d) = f.h.at(d, i) / f.L;
  return rel_residual(dell, rhs);
}

inline double lemma1c(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const int n = f.n;
  Tensor<Jet> dh = geom::vcov(f, f.h);
  Tensor<Jet> rhs(n, dh.signature());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int d = 0; d < n; ++d)
        rhs.at(i, j, d) = (f.h.at(d, i) * f.ell_lo.at(j) + f.h.at(d, j) * f.ell_lo.at(i)) / (-1.0 * f.L);
  return rel_residual(dh, rhs);
}

inline double lemma1d(Workspace& ws) {
  const geom::Frame& f = ws.base();
  double dev = std::max({max_abs(geom::hcov(f, geom::scalar_tensor(f.L))), max_abs(geom::hcov(f, f.ell_lo)),
                         max_abs(geom::hcov(f, f.h)), max_abs(geom::hcov(f, f.g))});
  return dev / (1.0 + dev);
}

// --- starred tensors ---------------------------------------------------------

inline double eq12_star_metric(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& s = ws.star();
  double r = rel_residual(q.ell_star_lo, s.ell_lo);
  r = std::max(r, rel_residual(q.h_star, s.h));
  r = std::max(r, rel_residual(q.g_star, s.g));
  return r;
}

inline double eq12_g_star_inverse(Workspace& ws) { return rel_residual(ws.sq().g_star_inv, ws.star().g_inv); }

inline double prop1_m_nu_phi(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = f.n;
  double dev = 0.0, scale = 1.0;
  Jet lm(0.0), lsm(0.0), nm(0.0);
  for (int i = 0; i < n; ++i) {
    lm += f.ell_lo.at(i) * q.m_bar.at(i);
    lsm += q.ell_star_lo.at(i) * q.m_bar.at(i);
    nm += q.nu.at(i) * q.m_bar.at(i);
  }
  scale = std::max(scale, std::abs(q.nu_m.value()));
  dev = std::max(dev, std::abs(lm.value()));
  dev = std::max(dev, std::abs(lsm.value() - q.nu_m.value()));
  dev = std::max(dev, std::abs(nm.value() - q.nu_m.value()));
  for (int i = 0; i < n; ++i) {
    Jet acc(0.0);
    for (int j = 0; j < n; ++j) acc += q.phi.at(i, j) * q.m_bar.at(j);
    dev = std::max(dev, std::abs(acc.value() - q.m_bar.at(i).value()));
    for (int j = 0; j < n; ++j) {
      // phi* = I - l* (x) eta / L*, straight from the starred frame data
      double id = (i == j) ? 1.0 : 0.0;
      double direct = id - ws.star().ell_lo.at(j).value() / ws.star().L.value() * f.site.y[static_cast<std::size_t>(i)];
      dev = std::max(dev, std::abs(q.phi_star.at(i, j).value() - direct));
      scale = std::max(scale, std::abs(direct));
    }
  }
  return norm_pair(dev, scale);
}

inline double prop1e_nu_tau(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  Tensor<Jet> rhs(f.n, {Slot::lo});
  for (int i = 0; i < f.n; ++i) rhs.at(i) = f.L * f.dy(q.tau, i);
  return rel_residual(rhs, q.nu);
}

inline double lemma3a(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = f.n;
  Tensor<Jet> dom = geom::vcov(f, q.b_lo);
  Tensor<Jet> rhs(n, dom.signature());
  for (int d = 0; d < n; ++d)
    for (int i = 0; i < n; ++i) {
      Jet acc(0.0);
      for (int k = 0; k < n; ++k) acc -= q.b_lo.at(k) * f.C_mix.at(k, d, i);
      rhs.at(i, d) = acc;
    }
  double r = rel_residual(dom, rhs);
  // special value: the eta-contraction vanishes identically
  for (int d = 0; d < n; ++d) {
    Jet eta(0.0);
    for (int i = 0; i < n; ++i) eta += dom.at(i, d) * ws.Y(i);
    r = std::max(r, std::abs(eta.value()) / (1.0 + std::abs(eta.value())));
  }
  return r;
}

inline double lemma3b(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = f.n;
  Tensor<Jet> dom = geom::hcov(f, q.b_lo);
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i) {
    // special value: (nabla_beta omega)(eta) = l*(N(X))
    Jet lhs_eta(0.0), rhs_eta(0.0);
    for (int j = 0; j < n; ++j) lhs_eta += dom.at(j, i) * ws.Y(j);
    for (int h = 0; h < n; ++h) rhs_eta += q.ell_star_lo.at(h) * q.N_mix.at(h, i);
    dev = std::max(dev, std::abs(lhs_eta.value() - rhs_eta.value()));
    scale = std::max({scale, std::abs(lhs_eta.value()), std::abs(rhs_eta.value())});
    // full expansion; the A-term sign matches eq15_residual (see there)
    for (int j = 0; j < n; ++j) {
      Jet rhs(0.0);
      for (int k = 0; k < n; ++k) rhs += q.ell_star_lo.at(k) * q.B_mix.at(k, i, j);
      for (int r = 0; r < n; ++r) {
        Jet nr = q.N_mix.at(r, i);
        for (int k = 0; k < n; ++k) rhs -= q.ell_star_lo.at(k) * q.A_mix.at(k, r, j) * nr;
        rhs += nr * f.h.at(r, j) / f.L;
        for (int k = 0; k < n; ++k) rhs -= q.b_lo.at(k) * f.C_mix.at(k, r, j) * nr;
      }
      dev = std::max(dev, std::abs(dom.at(j, i).value() - rhs.value()));
      scale = std::max({scale, std::abs(rhs.value())});
    }
  }
  return norm_pair(dev, scale);
}

inline double prop4_A(Workspace& ws) { return rel_residual(ws.sq().A_mix, ws.diff().A); }

inline double prop2a_torsion(Workspace& ws) { return rel_residual(ws.sq().C_star_mix, ws.star().C_mix); }

inline double eq10_A_star(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const int n = q.n;
  Tensor<Jet> lowered(n, {Slot::lo, Slot::lo, Slot::lo});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc(0.0);
        for (int m = 0; m < n; ++m) acc += q.g_star.at(k, m) * q.A_mix.at(m, i, j);
        lowered.at(i, j, k) = acc;
      }
  return rel_residual(lowered, q.A_star_lll);
}

inline double cor1a(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = q.n;
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet wTij(0.0);
      for (int m = 0; m < n; ++m) wTij += q.b_lo.at(m) * f.C_mix.at(m, i, j);
      for (int k = 0; k < n; ++k) {
        Jet wTik(0.0);
        for (int m = 0; m < n; ++m) wTik += q.b_lo.at(m) * f.C_mix.at(m, i, k);
        Jet rhs = q.A_star_lll.at(i, k, j) + wTik * q.ell_star_lo.at(j) - wTij * q.ell_star_lo.at(k);
        dev = std::max(dev, std::abs(q.A_star_lll.at(i, j, k).value() - rhs.value()));
        scale = std::max({scale, std::abs(rhs.value())});
      }
    }
  return norm_pair(dev, scale);
}

inline double cor1b(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = q.n;
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet wTij(0.0);
      for (int m = 0; m < n; ++m) wTij += q.b_lo.at(m) * f.C_mix.at(m, i, j);
      Jet lhs(0.0);
      for (int k = 0; k < n; ++k) lhs += q.A_star_lll.at(i, j, k) * ws.Y(k);
      Jet rhs = -1.0 * (q.Lstar * wTij);
      dev = std::max(dev, std::abs(lhs.value() - rhs.value()));
      scale = std::max({scale, std::abs(rhs.value())});
    }
  return norm_pair(dev, scale);
}

// Symmetry of the vertical difference tensor, measured on the engine-side
// recomputation (the closed form is symmetric by construction).
inline double cor2c_A_symmetric(Workspace& ws) {
  const Tensor<Jet>& A = ws.diff().A;
  const int n = A.extent();
  double dev = 0.0, scale = 1.0;
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dev = std::max(dev, std::abs(A.at(h, i, j).value() - A.at(h, j, i).value()));
        scale = std::max(scale, std::abs(A.at(h, i, j).value()));
      }
  return norm_pair(dev, scale);
}

inline double prop2b(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const int n = q.n;
  double dev = 0.0, scale = 1.0;
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet lhs = q.B_mix.at(h, i, j) - q.B_mix.at(h, j, i);
        Jet rhs(0.0);
        for (int r = 0; r < n; ++r)
          rhs += q.N_mix.at(r, i) * q.C_star_mix.at(h, r, j) - q.N_mix.at(r, j) * q.C_star_mix.at(h, r, i);
        dev = std::max(dev, std::abs(lhs.value() - rhs.value()));
        scale = std::max({scale, std::abs(lhs.value()), std::abs(rhs.value())});
      }
  return norm_pair(dev, scale);
}

inline double prop2c(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = q.n;
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet wTij(0.0);
      for (int m = 0; m < n; ++m) wTij += q.b_lo.at(m) * f.C_mix.at(m, i, j);
      for (int k = 0; k < n; ++k) {
        Jet rhs = q.tau * f.C_lll.at(i, j, k) + wTij * q.ell_star_lo.at(k) + q.A_star_lll.at(i, j, k);
        dev = std::max(dev, std::abs(q.C_star_lll.at(i, j, k).value() - rhs.value()));
        scale = std::max({scale, std::abs(rhs.value())});
      }
    }
  return norm_pair(dev, scale);
}

inline double cor3_T_star(Workspace& ws) { return rel_residual(ws.sq().T_star_lll, ws.star().C_lll); }

inline double lemma5_trace(Workspace& ws) { return rel_residual(ws.sq().C_star_tr, ws.star().C_tr); }

inline double eq13_b_parts(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const int n = q.n;
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i) {
    Jet i0(0.0);
    for (int k = 0; k < n; ++k) {
      Jet sum = q.b_sym.at(i, k) + q.b_skew.at(i, k);
      dev = std::max(dev, std::abs(sum.value() - q.b_ij.at(i, k).value()));
      scale = std::max(scale, std::abs(q.b_ij.at(i, k).value()));
      i0 += q.b_ij.at(i, k) * ws.Y(k);
    }
    dev = std::max(dev, std::abs(i0.value() - q.b_i0.at(i).value()));
  }
  return norm_pair(dev, scale);
}

inline double eq14_N0(Workspace& ws) { return rel_residual(ws.sq().N0, ws.diff().N0); }
inline double eq14_N(Workspace& ws) { return rel_residual(ws.sq().N_mix, ws.diff().N); }
inline double eq14_B(Workspace& ws) { return rel_residual(ws.sq().B_mix, ws.diff().B); }

inline double eq15_bij(Workspace& ws) { return randers::eq15_residual(ws.base(), ws.sq()); }

inline double eq8_U_split(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = q.n;
  Tensor<Jet> rhs(n, {Slot::up, Slot::lo, Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc = q.B_mix.at(h, i, j);
        for (int r = 0; r < n; ++r) acc += f.N.at(r, i) * q.A_mix.at(h, r, j);
        rhs.at(h, i, j) = acc;
      }
  return rel_residual(ws.diff().Gamma_diff, rhs);
}

inline double eq9_star_basis(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const geom::Frame& f = ws.base();
  const int n = q.n;
  Tensor<Jet> predicted(n, {Slot::up, Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i) predicted.at(h, i) = f.N.at(h, i) + q.N_mix.at(h, i);
  return rel_residual(predicted, ws.star().N);
}

// --- curvature relations ------------------------------------------------------

inline double prop3a(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const geom::Frame& s = ws.star();
  const randers::StarQuantities& q = ws.sq();
  const int n = f.n;
  const Tensor<Jet>&R = f.R(), &Rs = s.R(), &Ps = s.P(), &Qs = s.Q();
  const Tensor<Jet>&A = q.A_mix, &B = q.B_mix, &Nm = q.N_mix;
  const Tensor<Jet>& hB = ws.hB();
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int h = 0; h < n; ++h) {
          double lhs = Rs.at(h, i, j, k).value();
          for (int r = 0; r < n; ++r) {
            lhs += Nm.at(r, i).value() * Ps.at(h, r, j, k).value();
            lhs -= Nm.at(r, j).value() * Ps.at(h, r, i, k).value();
            for (int t = 0; t < n; ++t) lhs += Nm.at(r, i).value() * Nm.at(t, j).value() * Qs.at(h, r, t, k).value();
          }
          double rhs = R.at(h, i, j, k).value() + hB.at(h, i, k, j).value() - hB.at(h, j, k, i).value();
          for (int sidx = 0; sidx < n; ++sidx) {
            Jet Reta(0.0);
            for (int m = 0; m < n; ++m) Reta += R.at(sidx, i, j, m) * ws.Y(m);
            rhs += Reta.value() * A.at(h, sidx, k).value();
          }
          for (int r = 0; r < n; ++r)
            rhs += B.at(h, j, r).value() * B.at(r, i, k).value() - B.at(h, i, r).value() * B.at(r, j, k).value();
          dev = std::max(dev, std::abs(lhs - rhs));
          scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
  return norm_pair(dev, scale);
}

inline double prop3b(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const geom::Frame& s = ws.star();
  const randers::StarQuantities& q = ws.sq();
  const int n = f.n;
  const Tensor<Jet>&P = f.P(), &Ps = s.P(), &Qs = s.Q();
  const Tensor<Jet>&A = q.A_mix, &B = q.B_mix, &Nm = q.N_mix;
  const Tensor<Jet>&vB = ws.vB(), &hA = ws.hA();
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int h = 0; h < n; ++h) {
          double lhs = Ps.at(h, i, j, k).value();
          for (int r = 0; r < n; ++r) lhs += Qs.at(h, i, r, k).value() * Nm.at(r, j).value();
          double rhs = P.at(h, i, j, k).value() - vB.at(h, j, k, i).value() + hA.at(h, i, k, j).value();
          for (int sidx = 0; sidx < n; ++sidx) {
            Jet Peta(0.0);
            for (int m = 0; m < n; ++m) Peta += P.at(sidx, i, j, m) * ws.Y(m);
            rhs += Peta.value() * A.at(h, sidx, k).value();
          }
          for (int r = 0; r < n; ++r) {
            rhs -= f.C_mix.at(r, i, j).value() * B.at(h, r, k).value();
            rhs += B.at(h, j, r).value() * A.at(r, i, k).value();
            rhs -= A.at(h, i, r).value() * B.at(r, j, k).value();
          }
          dev = std::max(dev, std::abs(lhs - rhs));
          scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
  return norm_pair(dev, scale);
}

inline double prop3c(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const geom::Frame& s = ws.star();
  const randers::StarQuantities& q = ws.sq();
  const int n = f.n;
  const Tensor<Jet>&Q = f.Q(), &Qs = s.Q();
  const Tensor<Jet>& A = q.A_mix;
  const Tensor<Jet>& vA = ws.vA();
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int h = 0; h < n; ++h) {
          double lhs = Qs.at(h, i, j, k).value();
          double rhs = Q.at(h, i, j, k).value() + vA.at(h, i, k, j).value() - vA.at(h, j, k, i).value();
          for (int r = 0; r < n; ++r)
            rhs += A.at(h, j, r).value() * A.at(r, i, k).value() - A.at(h, i, r).value() * A.at(r, j, k).value();
          dev = std::max(dev, std::abs(lhs - rhs));
          scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
  return norm_pair(dev, scale);
}

// --- trace-derivative relations -----------------------------------------------

// Exact form of the starred trace derivative along the starred horizontal
// fundamental direction, with all difference-tensor corrections included.
inline double prop6_general(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const geom::Frame& s = ws.star();
  const randers::StarQuantities& q = ws.sq();
  const int n = f.n;
  Tensor<Jet> hCs = geom::hcov(s, s.C_tr);
  Tensor<Jet> hC = geom::hcov(f, f.C_tr);
  Tensor<Jet> vC = geom::vcov(f, f.C_tr);
  Tensor<Jet> hnu = geom::hcov(f, q.nu);
  Tensor<Jet> vnu = geom::vcov(f, q.nu);
  Jet kappa = Jet(0.5 * (n + 1)) / q.Lstar;
  double dev = 0.0, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    Jet lhs(0.0), rhs(0.0);
    for (int d = 0; d < n; ++d) {
      lhs += hCs.at(k, d) * ws.Y(d);
      rhs += hC.at(k, d) * ws.Y(d);
    }
    for (int r = 0; r < n; ++r) rhs -= q.N0.at(r) * vC.at(k, r);
    Jet nupart(0.0);
    for (int d = 0; d < n; ++d) nupart += hnu.at(k, d) * ws.Y(d);
    for (int r = 0; r < n; ++r) nupart -= q.N0.at(r) * vnu.at(k, r);
    for (int h = 0; h < n; ++h) {
      Jet AN0(0.0), Beta(0.0);
      for (int r = 0; r < n; ++r) AN0 += q.A_mix.at(h, r, k) * q.N0.at(r);
      for (int i = 0; i < n; ++i) Beta += q.B_mix.at(h, i, k) * ws.Y(i);
      rhs += f.C_tr.at(h) * (AN0 - Beta);
      nupart += q.nu.at(h) * (AN0 - Beta);
    }
    rhs += kappa * nupart;
    dev = std::max(dev, std::abs(lhs.value() - rhs.value()));
    scale = std::max({scale, std::abs(lhs.value()), std::abs(rhs.value())});
  }
  return norm_pair(dev, scale);
}

// The shortened form of the same relation with every difference-tensor
// correction dropped.  For a closed non-parallel form the corrections do not
// vanish, so this residual is expected to stay finite there; see
// docs/theory.md.
inline double prop6_closed_form(Workspace& ws) {
  const geom::Frame& f = ws.base();
  const geom::Frame& s = ws.star();
  const randers::StarQuantities& q = ws.sq();
  const int n = f.n;
  Tensor<Jet> hCs = geom::hcov(s, s.C_tr);
  Tensor<Jet> hC = geom::hcov(f, f.C_tr);
  Tensor<Jet> hnu = geom::hcov(f, q.nu);
  Jet kappa = Jet(0.5 * (n + 1)) / q.Lstar;
  double dev = 0.0, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    Jet lhs(0.0), rhs(0.0);
    for (int d = 0; d < n; ++d) {
      lhs += hCs.at(k, d) * ws.Y(d);
      rhs += (hC.at(k, d) + kappa * hnu.at(k, d)) * ws.Y(d);
    }
    dev = std::max(dev, std::abs(lhs.value() - rhs.value()));
    scale = std::max({scale, std::abs(lhs.value()), std::abs(rhs.value())});
  }
  return norm_pair(dev, scale);
}

// --- theorem-level quantities ---------------------------------------------------

// Antisymmetry defect of the coordinate derivative matrix of b; reported as
// an absolute value (it is the quantity the closedness statements speak of).
inline double dJ_closedness(Workspace& ws) {
  const randers::StarQuantities& q = ws.sq();
  const int n = q.n;
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dbij = q.b_lo.at(j).derivative(i).value();
      double dbji = q.b_lo.at(i).derivative(j).value();
      dev = std::max(dev, std::abs(dbij - dbji));
    }
  return dev;
}

inline double theorem1_omega(Workspace& ws) { return vanishing_residual(ws.sq().b_ij); }
inline double theorem1_B(Workspace& ws) { return vanishing_residual(ws.diff().B); }
inline double theorem2_N_zero(Workspace& ws) { return vanishing_residual(ws.diff().N); }
inline double theorem2_N0_zero(Workspace& ws) { return vanishing_residual(ws.diff().N0); }

inline double theorem3_berwald_star(Workspace& ws) {
  const geom::Frame& s = ws.star();
  return vanishing_residual(geom::hcov(s, s.C_mix));
}

inline double theorem3_A_parallel(Workspace& ws) { return vanishing_residual(ws.hA()); }

inline double landsberg_defect(const geom::Frame& f) {
  const int n = f.n;
  const Tensor<Jet>& P = f.P();
  Tensor<double> peta(n, {Slot::up, Slot::lo, Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += P.at(h, i, j, k).value() * f.site.y[static_cast<std::size_t>(k)];
        peta.at(h, i, j) = acc;
      }
  return vanishing_residual(peta);
}

inline double theorem4_landsberg_star(Workspace& ws) { return landsberg_defect(ws.star()); }
inline double landsberg_base(Workspace& ws) { return landsberg_defect(ws.base()); }
inline double berwald_base(Workspace& ws) {
  const geom::Frame& f = ws.base();
  return vanishing_residual(geom::hcov(f, f.C_mix));
}
inline double base_flatness_R(Workspace& ws) { return vanishing_residual(ws.base().R()); }
inline double prop5_R_star(Workspace& ws) { return vanishing_residual(ws.star().R()); }

}  // namespace checks

inline const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> defs = {
      // engine invariants
      {"euler_identities", "Euler homogeneity contractions of g, h, C", 1e-10, CheckKind::invariant, checks::euler_identities},
      {"homogeneity", "homogeneity degrees of L, g, C, G, N under y-scaling", 1e-9, CheckKind::invariant, checks::homogeneity},
      {"cartan_axioms", "metric compatibility, symmetry, deflection of the connection", 1e-9, CheckKind::invariant,
       checks::cartan_axioms},
      // derivative identities of the base frame
      {"lemma1a_v_L", "vertical derivative of L is ell", 1e-8, CheckKind::identity, checks::lemma1a},
      {"lemma1b_v_ell", "vertical derivative of ell is h/L", 1e-8, CheckKind::identity, checks::lemma1b},
      {"lemma1c_v_h", "vertical derivative of the angular metric", 1e-8, CheckKind::identity, checks::lemma1c},
      {"lemma1d_h_metric", "horizontal derivatives of L, ell, h, g vanish", 1e-8, CheckKind::identity, checks::lemma1d},
      // starred tensors against the engine rerun on L*
      {"eq12_star_metric", "closed-form ell*, h*, g* against the engine on L*", 1e-9, CheckKind::oracle,
       checks::eq12_star_metric},
      {"eq12_g_star_inverse", "closed-form inverse of g* against the engine", 1e-9, CheckKind::oracle,
       checks::eq12_g_star_inverse},
      {"prop1_m_nu_phi", "the m/nu/phi relations", 1e-8, CheckKind::identity, checks::prop1_m_nu_phi},
      {"prop1e_nu_tau", "nu equals L times the vertical derivative of tau", 1e-8, CheckKind::identity, checks::prop1e_nu_tau},
      {"lemma3a_v_omega", "vertical derivative of omega against torsion contraction", 1e-8, CheckKind::identity,
       checks::lemma3a},
      {"lemma3b_h_omega", "horizontal derivative of omega, full expansion and eta value", 1e-8, CheckKind::identity,
       checks::lemma3b},
      {"prop4_A", "closed-form A against the engine torsion difference", 1e-8, CheckKind::oracle, checks::prop4_A},
      {"prop2a_torsion", "starred torsion equals base torsion plus A", 1e-8, CheckKind::oracle, checks::prop2a_torsion},
      {"eq10_A_star", "lowered A against its closed n-form", 1e-8, CheckKind::identity, checks::eq10_A_star},
      {"cor1a_A_star_swap", "slot-swap relation of the lowered A", 1e-8, CheckKind::identity, checks::cor1a},
      {"cor1b_A_star_eta", "eta-contraction of the lowered A", 1e-8, CheckKind::identity, checks::cor1b},
      {"cor2c_A_symmetric", "symmetry of the engine-side A", 1e-8, CheckKind::identity, checks::cor2c_A_symmetric},
      {"prop2b_B_antisym", "antisymmetric part of B against starred torsion", 1e-8, CheckKind::identity, checks::prop2b},
      {"prop2c_T_star_lowered", "lowered starred torsion expansion", 1e-8, CheckKind::identity, checks::prop2c},
      {"cor3_T_star", "closed-form lowered starred torsion against the engine", 1e-8, CheckKind::oracle, checks::cor3_T_star},
      {"lemma5_trace", "closed-form starred trace against the engine", 1e-9, CheckKind::oracle, checks::lemma5_trace},
      {"eq13_b_parts", "consistency of the split of the derivative matrix of b", 1e-10, CheckKind::identity,
       checks::eq13_b_parts},
      {"eq14_N0", "closed-form N0 against the spray difference", 1e-7, CheckKind::oracle, checks::eq14_N0},
      {"eq14_N", "closed-form N against the nonlinear-connection difference", 1e-7, CheckKind::oracle, checks::eq14_N},
      {"eq14_B", "closed-form B against the horizontal-coefficient difference", 1e-7, CheckKind::oracle, checks::eq14_B},
      {"eq15_b_matrix", "local form of the horizontal derivative of omega", 1e-8, CheckKind::identity, checks::eq15_bij},
      {"eq8_U_split", "chart-basis connection difference splits into A and B parts", 1e-7, CheckKind::oracle,
       checks::eq8_U_split},
      {"eq9_star_basis", "starred nonlinear connection equals base plus difference", 1e-7, CheckKind::oracle,
       checks::eq9_star_basis},
      // curvature relations
      {"prop3a_h_curvature", "horizontal curvature relation", 1e-6, CheckKind::oracle, checks::prop3a},
      {"prop3b_hv_curvature", "mixed curvature relation", 1e-6, CheckKind::oracle, checks::prop3b},
      {"prop3c_v_curvature", "vertical curvature relation", 1e-6, CheckKind::oracle, checks::prop3c},
      {"prop6_general_trace", "starred trace derivative, exact form", 1e-7, CheckKind::oracle, checks::prop6_general},
      // theorem-level quantities (run by name or through theorem suites)
      {"dJ_closedness", "antisymmetry defect of the coordinate derivative of b", 1e-12, CheckKind::theorem,
       checks::dJ_closedness},
      {"theorem1_omega", "norm of the covariant derivative matrix of b", 1e-10, CheckKind::theorem, checks::theorem1_omega},
      {"theorem1_B", "norm of the horizontal difference tensor B", 1e-9, CheckKind::theorem, checks::theorem1_B},
      {"theorem2_N_zero", "norm of the difference tensor N", 1e-9, CheckKind::theorem, checks::theorem2_N_zero},
      {"theorem2_N0_zero", "norm of the contracted difference tensor N0", 1e-9, CheckKind::theorem,
       checks::theorem2_N0_zero},
      {"theorem3_berwald_star", "starred horizontal derivative of the starred torsion", 1e-7, CheckKind::theorem,
       checks::theorem3_berwald_star},
      {"theorem3_A_parallel", "horizontal derivative of A", 1e-7, CheckKind::theorem, checks::theorem3_A_parallel},
      {"theorem4_landsberg_star", "starred mixed curvature contracted with eta", 1e-7, CheckKind::theorem,
       checks::theorem4_landsberg_star},
      {"landsberg_base", "base mixed curvature contracted with eta", 1e-7, CheckKind::theorem, checks::landsberg_base},
      {"berwald_base", "base horizontal derivative of the torsion", 1e-7, CheckKind::theorem, checks::berwald_base},
      {"base_flatness_R", "norm of the base horizontal curvature", 1e-8, CheckKind::theorem, checks::base_flatness_R},
      {"prop5_R_star", "norm of the starred horizontal curvature", 1e-8, CheckKind::theorem, checks::prop5_R_star},
      {"prop6_closed_form", "starred trace derivative, shortened form", 1e-7, CheckKind::theorem, checks::prop6_closed_form},
  };
  return defs;
}

inline const CheckDef* find_check(const std::string& id) {
  for (const CheckDef& d : registry())
    if (d.id == id) return &d;
  return nullptr;
}

// The default suite: everything that holds identically on every admissible
// instance.  Theorem-level vanishing checks are instance-dependent and run
// only when named explicitly or through a theorem suite.
inline std::vector<std::string> default_check_ids() {
  std::vector<std::string> ids;
  for (const CheckDef& d : registry())
    if (d.kind != CheckKind::theorem) ids.push_back(d.id);
  return ids;
}

struct RunOptions {
  int jet_order = 4;
  std::map<std::string, double> tol_overrides;
};

// Evaluates the listed checks over one drawn sample, sharing the per-point
// frames between checks.  Points are processed in parallel; reductions run
// in index order so results do not depend on the thread count.
inline std::vector<ResidualReport> run_checks(const std::vector<std::string>& ids, const randers::RandersBundle& bundle,
                                              const SamplePlan& plan, const RunOptions& opts = {}) {
  std::vector<const CheckDef*> defs;
  defs.reserve(ids.size());
  for (const std::string& id : ids) {
    const CheckDef* d = find_check(id);
    if (!d) throw Error(ErrorKind::config, "unknown check id '" + id + "'");
    defs.push_back(d);
  }
  DrawResult drawn = draw_points(plan, bundle);
  const std::size_t npts = drawn.points.size();
  std::vector<std::vector<double>> residuals(npts, std::vector<double>(defs.size(), 0.0));
  parallel_for(npts, [&](std::size_t pi) {
    Workspace ws(bundle, drawn.points[pi], opts.jet_order);
    for (std::size_t ci = 0; ci < defs.size(); ++ci) residuals[pi][ci] = defs[ci]->fn(ws);
  });
  std::vector<ResidualReport> reports;
  reports.reserve(defs.size());
  for (std::size_t ci = 0; ci < defs.size(); ++ci) {
    ResidualReport rep;
    rep.check_id = defs[ci]->id;
    rep.instance = plan.instance;
    rep.points_evaluated = static_cast<int>(npts);
    rep.points_skipped = drawn.skipped;
    auto it = opts.tol_overrides.find(defs[ci]->id);
    rep.tolerance = it != opts.tol_overrides.end() ? it->second : defs[ci]->tol;
    double sum = 0.0;
    for (std::size_t pi = 0; pi < npts; ++pi) {
      double r = residuals[pi][ci];
      sum += r;
      if (r >= rep.max_residual) {
        rep.max_residual = r;
        rep.witness = {drawn.points[pi], r};
      }
    }
    rep.mean_residual = sum / static_cast<double>(npts);
    double skipped_fraction = static_cast<double>(drawn.skipped) / static_cast<double>(plan.count);
    rep.pass = rep.max_residual <= rep.tolerance && skipped_fraction <= 0.10;
    reports.push_back(std::move(rep));
  }
  return reports;
}

inline ResidualReport run_check(const CheckSpec& spec, const SamplePlan& plan) {
  randers::RandersBundle bundle = cat::make_bundle(spec.instance.empty() ? plan.instance : spec.instance);
  RunOptions opts;
  if (spec.tolerance > 0.0) opts.tol_overrides[spec.id] = spec.tolerance;
  return run_checks({spec.id}, bundle, plan, opts).front();
}

// --- theorem suites -------------------------------------------------------------

// A theorem suite emits the hypothesis and conclusion residuals of one
// statement.  On instances satisfying the hypothesis both are expected to be
// small; on a designated violating instance the suite checks the
// contrapositive, i.e. that the residuals are genuinely large.
inline constexpr double kFalsificationFloor = 1e-3;

inline std::vector<ResidualReport> theorem_suite(const randers::RandersBundle& bundle, const cat::Tags& tags,
                                                 const std::string& theorem_id, const SamplePlan& plan,
                                                 const RunOptions& opts = {}) {
  auto run = [&](std::vector<std::string> ids) { return run_checks(ids, bundle, plan, opts); };
  auto expect_large = [](ResidualReport& r) { r.pass = r.max_residual > kFalsificationFloor; };

  if (theorem_id == "theorem1") {
    auto reports = run({"theorem1_omega", "theorem1_B", "eq15_b_matrix"});
    if (!tags.parallel_b) {
      expect_large(reports[0]);
      expect_large(reports[1]);
    }
    return reports;
  }
  if (theorem_id == "theorem2") {
    auto reports = run({"dJ_closedness", "theorem2_N_zero"});
    if (!tags.closed) {
      expect_large(reports[0]);
      expect_large(reports[1]);
    }
    return reports;
  }
  if (theorem_id == "theorem3") {
    if (!tags.parallel_b || !tags.berwald_base)
      throw Error(ErrorKind::config, "theorem3 suite needs an instance tagged parallel-b with a Berwald base");
    return run({"berwald_base", "theorem3_A_parallel", "theorem3_berwald_star"});
  }
  if (theorem_id == "theorem4") {
    if (!tags.parallel_b || !tags.landsberg_base)
      throw Error(ErrorKind::config, "theorem4 suite needs an instance tagged parallel-b with a Landsberg base");
    return run({"landsberg_base", "theorem4_landsberg_star"});
  }
  if (theorem_id == "prop5") {
    if (!tags.parallel_b) throw Error(ErrorKind::config, "prop5 suite needs an instance tagged parallel-b");
    auto reports = run({"base_flatness_R", "prop5_R_star"});
    // biconditional: both small or both large
    bool base_small = reports[0].max_residual <= reports[0].tolerance;
    bool star_small = reports[1].max_residual <= reports[1].tolerance;
    reports[1].pass = (base_small == star_small);
    return reports;
  }
  if (theorem_id == "theorem5") {
    if (!tags.closed) throw Error(ErrorKind::config, "theorem5 suite needs an instance tagged closed");
    auto reports = run({"base_flatness_R", "prop5_R_star"});
    bool base_small = reports[0].max_residual <= reports[0].tolerance;
    bool star_small = reports[1].max_residual <= reports[1].tolerance;
    reports[1].pass = (base_small == star_small);
    return reports;
  }
  if (theorem_id == "theorem6") {
    if (!tags.closed) throw Error(ErrorKind::config, "theorem6 suite needs an instance tagged closed");
    return run({"prop6_general_trace", "prop6_closed_form"});
  }
  throw Error(ErrorKind::config, "unknown theorem suite '" + theorem_id + "'");
}

}  // namespace finsler::verify
