// SPDX-License-Identifier: Apache-2.0
//
// The coordinate realization of the Cartan apparatus of a metric L(x, y).
//
// All frame quantities are jets in the 2n bundle variables, so every derived
// tensor carries its own partial derivatives and can be differentiated again
// (covariant derivatives, curvature).  Conventions used throughout, with
// e_i = d/dx^i - N^r_i d/dy^r the horizontal basis:
//
//   g_ij    = 1/2 d^2(L^2)/dy^i dy^j
//   ell_i   = dL/dy^i,  ell^i = y^i / L,  h_ij = g_ij - ell_i ell_j
//   C_ijk   = 1/2 dg_ij/dy^k,  C^h_ij = g^hm C_mij,  C_i = g^jk C_ijk
//   G^i     = 1/4 g^ih ( y^j d^2(L^2)/dy^h dx^j - d(L^2)/dx^h )
//   N^i_j   = dG^i/dy^j
//   Gbar^h_ij = 1/2 g^hk ( e_i g_kj + e_j g_ki - e_k g_ij )
//   Gamma^h_ij = Gbar^h_ij + N^r_i C^h_rj        (coefficients along d/dx^i)
//
// Curvature convention (see docs/theory.md for the derivation of the local
// formulas):  R(X, Y) = nabla_Y nabla_X - nabla_X nabla_Y + nabla_[X, Y].
// The stored components are R.at(h, i, j, k) = h-component of R(e_i, e_j)
// applied to the k-th frame section, and analogously for the mixed tensor P
// (first argument vertical) and the vertical tensor Q.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "finsler/common.hpp"
#include "finsler/fields.hpp"
#include "finsler/jet.hpp"
#include "finsler/tensor.hpp"

namespace finsler::geom {

inline constexpr double kDegenerateDet = 1e-12;

struct Frame {
  int n = 0;
  int order = 0;
  SlitPoint site;
  std::shared_ptr<const JetSpace> space;

  std::vector<Jet> X, Y;  // seeded coordinate jets; seeds 0..n-1 are x, n..2n-1 are y

  Jet L;
  Jet L2;
  double det_g = 0.0;

  Tensor<Jet> g;        // ll
  Tensor<Jet> g_inv;    // uu
  Tensor<Jet> ell_lo;   // l
  Tensor<Jet> ell_up;   // u
  Tensor<Jet> h;        // ll
  Tensor<Jet> C_lll;    // lll
  Tensor<Jet> C_mix;    // u,ll   (the mixed torsion T)
  Tensor<Jet> C_tr;     // l      (trace form)
  Tensor<Jet> G;        // u      (spray)
  Tensor<Jet> N;        // u,l    (nonlinear connection)
  Tensor<Jet> Gbar;     // u,ll   (horizontal coefficients, symmetric)
  Tensor<Jet> Gamma;    // u,ll   (coefficients along the chart basis)
  Tensor<Jet> S_audit;  // u,ll   antisymmetric part of Gbar; identically zero

  // d/dx^d w - N^r_d d/dy^r w
  Jet e_deriv(const Jet& w, int d) const {
    Jet r = w.derivative(d);
    for (int s = 0; s < n; ++s) r -= N.at(s, d) * w.derivative(n + s);
    return r;
  }

  Jet dx(const Jet& w, int d) const { return w.derivative(d); }
  Jet dy(const Jet& w, int d) const { return w.derivative(n + d); }

  const Tensor<Jet>& R() const;
  const Tensor<Jet>& P() const;
  const Tensor<Jet>& Q() const;

  // Curvature of the nonlinear connection: Rnl^s_ij = e_i N^s_j - e_j N^s_i,
  // so that [e_i, e_j] = -Rnl^s_ij d/dy^s.
  const Tensor<Jet>& Rnl() const;

private:
  mutable std::optional<Tensor<Jet>> R_, P_, Q_, Rnl_;
};

namespace detail {

// Inverse of a matrix of jets by Gauss-Jordan elimination with partial
// pivoting on the value parts.  Returns the determinant value.
inline double invert(int n, const Tensor<Jet>& m, Tensor<Jet>& inv) {
  std::vector<std::vector<Jet>> a(static_cast<std::size_t>(n), std::vector<Jet>(static_cast<std::size_t>(2 * n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.at(i, j);
    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = Jet(1.0);
  }
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)].value());
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].value());
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != col) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(col)]);
      det = -det;
    }
    Jet diag = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    det *= diag.value();
    if (std::abs(diag.value()) < kDegenerateDet)
      throw Error(ErrorKind::instance, "metric tensor is numerically degenerate");
    for (int j = col; j < 2 * n; ++j) a[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] /= diag;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      Jet f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (f.value() == 0.0 && f.is_constant()) continue;
      for (int j = col; j < 2 * n; ++j)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -= f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)];
  return det;
}

}  // namespace detail

// Full Cartan frame at a point.  `order` is the jet order carried through;
// the default 4 supports curvature values and one further covariant
// derivative of third-order quantitites.
inline Frame make_frame(const MetricField& metric, const SlitPoint& p, int order = 4) {
  if (!p.valid()) throw Error(ErrorKind::instance, "slit point needs matching dimensions and y != 0");
  if (static_cast<int>(p.dim()) != metric.n) throw Error(ErrorKind::instance, "point dimension does not match the metric");
  if (order < 3) throw Error(ErrorKind::config, "frame computation needs jet order >= 3");
  Frame f;
  f.n = metric.n;
  f.order = order;
  f.site = p;
  const int n = f.n;
  f.space = JetSpace::get(2 * n, order);
  f.X.resize(static_cast<std::size_t>(n));
  f.Y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    f.X[static_cast<std::size_t>(i)] = Jet::variable(f.space, p.x[static_cast<std::size_t>(i)], i, order);
    f.Y[static_cast<std::size_t>(i)] = Jet::variable(f.space, p.y[static_cast<std::size_t>(i)], n + i, order);
  }

  f.L = metric.L->eval(f.X, f.Y);
  if (!(f.L.value() > 0.0)) throw Error(ErrorKind::instance, "metric is not positive at the requested point");
  f.L2 = f.L * f.L;

  f.g = Tensor<Jet>(n, {Slot::lo, Slot::lo});
  for (int i = 0; i < n; ++i) {
    Jet di = f.dy(f.L2, i);
    for (int j = i; j < n; ++j) {
      Jet gij = f.dy(di, j) * 0.5;
      f.g.at(i, j) = gij;
      f.g.at(j, i) = gij;
    }
  }
  f.g_inv = Tensor<Jet>(n, {Slot::up, Slot::up});
  f.det_g = detail::invert(n, f.g, f.g_inv);

  f.ell_lo = Tensor<Jet>(n, {Slot::lo});
  f.ell_up = Tensor<Jet>(n, {Slot::up});
  for (int i = 0; i < n; ++i) {
    f.ell_lo.at(i) = f.dy(f.L, i);
    f.ell_up.at(i) = f.Y[static_cast<std::size_t>(i)] / f.L;
  }

  f.h = Tensor<Jet>(n, {Slot::lo, Slot::lo});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.h.at(i, j) = f.g.at(i, j) - f.ell_lo.at(i) * f.ell_lo.at(j);

  f.C_lll = Tensor<Jet>(n, {Slot::lo, Slot::lo, Slot::lo});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet gij = f.g.at(i, j);
      for (int k = 0; k < n; ++k) {
        Jet c = f.dy(gij, k) * 0.5;
        f.C_lll.at(i, j, k) = c;
        f.C_lll.at(j, i, k) = c;
      }
    }
  f.C_mix = Tensor<Jet>(n, {Slot::up, Slot::lo, Slot::lo});
  f.C_tr = Tensor<Jet>(n, {Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc(0.0);
        for (int m = 0; m < n; ++m) acc += f.g_inv.at(h, m) * f.C_lll.at(m, i, j);
        f.C_mix.at(h, i, j) = acc;
      }
  for (int i = 0; i < n; ++i) {
    Jet acc(0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) acc += f.g_inv.at(j, k) * f.C_lll.at(i, j, k);
    f.C_tr.at(i) = acc;
  }

  // spray
  f.G = Tensor<Jet>(n, {Slot::up});
  {
    std::vector<Jet> bracket(static_cast<std::size_t>(n), Jet(0.0));
    for (int h = 0; h < n; ++h) {
      Jet acc = -f.dx(f.L2, h);
      Jet dyh = f.dy(f.L2, h);
      for (int j = 0; j < n; ++j) acc += f.Y[static_cast<std::size_t>(j)] * f.dx(dyh, j);
      bracket[static_cast<std::size_t>(h)] = acc;
    }
    for (int i = 0; i < n; ++i) {
      Jet acc(0.0);
      for (int h = 0; h < n; ++h) acc += f.g_inv.at(i, h) * bracket[static_cast<std::size_t>(h)];
      f.G.at(i) = acc * 0.25;
    }
  }

  f.N = Tensor<Jet>(n, {Slot::up, Slot::lo});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.N.at(i, j) = f.dy(f.G.at(i), j);

  // horizontal Cartan coefficients
  f.Gbar = Tensor<Jet>(n, {Slot::up, Slot::lo, Slot::lo});
  {
    Tensor<Jet> eg(n, {Slot::lo, Slot::lo, Slot::lo});  // eg.at(d, i, j) = e_d g_ij
    for (int d = 0; d < n; ++d)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet v = f.e_deriv(f.g.at(i, j), d);
          eg.at(d, i, j) = v;
          eg.at(d, j, i) = v;
        }
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet acc(0.0);
          for (int k = 0; k < n; ++k)
            acc += f.g_inv.at(h, k) * (eg.at(i, k, j) + eg.at(j, k, i) - eg.at(k, i, j));
          acc = acc * 0.5;
          f.Gbar.at(h, i, j) = acc;
          f.Gbar.at(h, j, i) = acc;
        }
  }

  f.Gamma = Tensor<Jet>(n, {Slot::up, Slot::lo, Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc = f.Gbar.at(h, i, j);
        for (int r = 0; r < n; ++r) acc += f.N.at(r, i) * f.C_mix.at(h, r, j);
        f.Gamma.at(h, i, j) = acc;
      }

  f.S_audit = Tensor<Jet>(n, {Slot::up, Slot::lo, Slot::lo});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.S_audit.at(h, i, j) = f.Gbar.at(h, i, j) - f.Gbar.at(h, j, i);

  return f;
}

inline const Tensor<Jet>& Frame::Rnl() const {
  if (order < 4) throw Error(ErrorKind::jet_order, "curvature requires jet order >= 4");
  if (!Rnl_) {
    Tensor<Jet> r(n, {Slot::up, Slot::lo, Slot::lo});
    for (int s = 0; s < n; ++s)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(s, i, j) = e_deriv(N.at(s, j), i) - e_deriv(N.at(s, i), j);
    Rnl_ = std::move(r);
  }
  return *Rnl_;
}

inline const Tensor<Jet>& Frame::R() const {
  if (order < 4) throw Error(ErrorKind::jet_order, "curvature requires jet order >= 4");
  if (!R_) {
    const Tensor<Jet>& rnl = Rnl();
    Tensor<Jet> r(n, {Slot::up, Slot::lo, Slot::lo, Slot::lo});
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Jet acc = e_deriv(Gbar.at(h, i, k), j) - e_deriv(Gbar.at(h, j, k), i);
            for (int m = 0; m < n; ++m)
              acc += Gbar.at(m, i, k) * Gbar.at(h, j, m) - Gbar.at(m, j, k) * Gbar.at(h, i, m);
            for (int s = 0; s < n; ++s) acc -= rnl.at(s, i, j) * C_mix.at(h, s, k);
            r.at(h, i, j, k) = acc;
          }
    R_ = std::move(r);
  }
  return *R_;
}

inline const Tensor<Jet>& Frame::P() const {
  if (order < 4) throw Error(ErrorKind::jet_order, "curvature requires jet order >= 4");
  if (!P_) {
    Tensor<Jet> r(n, {Slot::up, Slot::lo, Slot::lo, Slot::lo});
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Jet acc = e_deriv(C_mix.at(h, i, k), j) - dy(Gbar.at(h, j, k), i);
            for (int m = 0; m < n; ++m)
              acc += C_mix.at(m, i, k) * Gbar.at(h, j, m) - Gbar.at(m, j, k) * C_mix.at(h, i, m);
            for (int s = 0; s < n; ++s) acc -= dy(N.at(s, j), i) * C_mix.at(h, s, k);
            r.at(h, i, j, k) = acc;
          }
    P_ = std::move(r);
  }
  return *P_;
}

inline const Tensor<Jet>& Frame::Q() const {
  if (order < 4) throw Error(ErrorKind::jet_order, "curvature requires jet order >= 4");
  if (!Q_) {
    Tensor<Jet> r(n, {Slot::up, Slot::lo, Slot::lo, Slot::lo});
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Jet acc = dy(C_mix.at(h, i, k), j) - dy(C_mix.at(h, j, k), i);
            for (int m = 0; m < n; ++m)
              acc += C_mix.at(m, i, k) * C_mix.at(h, j, m) - C_mix.at(m, j, k) * C_mix.at(h, i, m);
            r.at(h, i, j, k) = acc;
          }
    Q_ = std::move(r);
  }
  return *Q_;
}

namespace detail {

inline std::size_t pow_size(int n, int rank) {
  std::size_t s = 1;
  for (int r = 0; r < rank; ++r) s *= static_cast<std::size_t>(n);
  return s;
}

inline void unflatten(std::size_t flat, int n, int rank, std::vector<int>& idx) {
  idx.resize(static_cast<std::size_t>(rank));
  for (int r = rank - 1; r >= 0; --r) {
    idx[static_cast<std::size_t>(r)] = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
}

inline std::size_t flatten(const std::vector<int>& idx, int n) {
  std::size_t f = 0;
  for (int v : idx) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
  return f;
}

// Shared body of the two covariant derivatives: base(w, d) supplies the
// directional derivative of the component scalar, conn the connection
// coefficients (C_mix for the vertical one, Gbar for the horizontal one).
inline Tensor<Jet> cov_deriv(const Frame& f, const Tensor<Jet>& t, const Tensor<Jet>& conn,
                             const std::function<Jet(const Jet&, int)>& base) {
  const int n = f.n;
  const int rank = t.rank();
  std::vector<Slot> sig = t.signature();
  sig.push_back(Slot::lo);
  Tensor<Jet> out(n, sig);
  std::vector<int> idx;
  const std::size_t count = pow_size(n, rank);
  for (std::size_t flat = 0; flat < count; ++flat) {
    unflatten(flat, n, rank, idx);
    const Jet& w = t.data()[flat];
    for (int d = 0; d < n; ++d) {
      Jet acc = base(w, d);
      for (int slot = 0; slot < rank; ++slot) {
        int orig = idx[static_cast<std::size_t>(slot)];
        for (int r = 0; r < n; ++r) {
          std::vector<int> jdx = idx;
          jdx[static_cast<std::size_t>(slot)] = r;
          const Jet& wr = t.data()[flatten(jdx, n)];
          if (t.signature()[static_cast<std::size_t>(slot)] == Slot::up)
            acc += conn.at(orig, d, r) * wr;
          else
            acc -= conn.at(r, d, orig) * wr;
        }
      }
      std::vector<int> odx = idx;
      odx.push_back(d);
      out.data()[flatten(odx, n)] = acc;
    }
  }
  return out;
}

}  // namespace detail

// Vertical covariant derivative of a tensor field: a trailing lower slot is
// appended for the direction.
inline Tensor<Jet> vcov(const Frame& f, const Tensor<Jet>& t) {
  return detail::cov_deriv(f, t, f.C_mix, [&f](const Jet& w, int d) { return f.dy(w, d); });
}

// Horizontal covariant derivative along e_d, trailing direction slot.
inline Tensor<Jet> hcov(const Frame& f, const Tensor<Jet>& t) {
  return detail::cov_deriv(f, t, f.Gbar, [&f](const Jet& w, int d) { return f.e_deriv(w, d); });
}

inline Tensor<Jet> scalar_tensor(const Jet& v) {
  Tensor<Jet> t(1, {});
  t.data()[0] = v;
  return t;
}

// Contracts the trailing (direction) slot with y, e.g. to form derivatives
// along the fundamental section.
inline Tensor<Jet> contract_direction_with_y(const Frame& f, const Tensor<Jet>& t) {
  const int n = f.n;
  std::vector<Slot> sig = t.signature();
  sig.pop_back();
  Tensor<Jet> out(n, sig);
  const std::size_t outer = out.data().size();
  for (std::size_t o = 0; o < outer; ++o) {
    Jet acc(0.0);
    for (int d = 0; d < n; ++d) acc += t.data()[o * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] * f.Y[static_cast<std::size_t>(d)];
    out.data()[o] = acc;
  }
  return out;
}

// Plain-double spray evaluation for geodesic integration: jets of order 2 in
// all bundle variables, then one dense linear solve.
inline std::vector<double> spray(const MetricField& metric, const std::vector<double>& x, const std::vector<double>& y) {
  const int n = metric.n;
  auto space = JetSpace::get(2 * n, 2);
  std::vector<Jet> X(static_cast<std::size_t>(n)), Y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    X[static_cast<std::size_t>(i)] = Jet::variable(space, x[static_cast<std::size_t>(i)], i, 2);
    Y[static_cast<std::size_t>(i)] = Jet::variable(space, y[static_cast<std::size_t>(i)], n + i, 2);
  }
  Jet L = metric.L->eval(X, Y);
  if (!(L.value() > 0.0)) throw Error(ErrorKind::instance, "metric not positive along trajectory");
  Jet L2 = L * L;

  auto didx = [&](int a, int b) {  // index of the second-order monomial e_a + e_b
    std::vector<int> alpha(static_cast<std::size_t>(2 * n), 0);
    alpha[static_cast<std::size_t>(a)] += 1;
    alpha[static_cast<std::size_t>(b)] += 1;
    return alpha;
  };

  std::vector<double> gm(static_cast<std::size_t>(n * n));
  std::vector<double> rhs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gm[static_cast<std::size_t>(i * n + j)] = 0.5 * L2.partial(didx(n + i, n + j));
  for (int h = 0; h < n; ++h) {
    std::vector<int> dh(static_cast<std::size_t>(2 * n), 0);
    dh[static_cast<std::size_t>(h)] = 1;
    double acc = -L2.partial(dh);
    for (int j = 0; j < n; ++j) acc += y[static_cast<std::size_t>(j)] * L2.partial(didx(n + h, j));
    rhs[static_cast<std::size_t>(h)] = 0.25 * acc;
  }
  // solve g * G = rhs
  std::vector<double> G(rhs);
  std::vector<double> a(gm);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * n + col)]) > std::abs(a[static_cast<std::size_t>(piv * n + col)])) piv = r;
    if (std::abs(a[static_cast<std::size_t>(piv * n + col)]) < kDegenerateDet)
      throw Error(ErrorKind::instance, "degenerate metric along trajectory");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a[static_cast<std::size_t>(piv * n + j)], a[static_cast<std::size_t>(col * n + j)]);
      std::swap(G[static_cast<std::size_t>(piv)], G[static_cast<std::size_t>(col)]);
    }
    double d = a[static_cast<std::size_t>(col * n + col)];
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double fct = a[static_cast<std::size_t>(r * n + col)] / d;
      for (int j = col; j < n; ++j) a[static_cast<std::size_t>(r * n + j)] -= fct * a[static_cast<std::size_t>(col * n + j)];
      G[static_cast<std::size_t>(r)] -= fct * G[static_cast<std::size_t>(col)];
    }
  }
  for (int i = 0; i < n; ++i) G[static_cast<std::size_t>(i)] /= a[static_cast<std::size_t>(i * n + i)];
  return G;
}

}  // namespace finsler::geom
