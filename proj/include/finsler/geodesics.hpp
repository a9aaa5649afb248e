// SPDX-License-Identifier: Apache-2.0
//
// Geodesic integration (x'' + 2 G(x, x') = 0) with the Dormand-Prince 5(4)
// embedded pair, plus arc-length reparametrization so two traces can be
// compared as unparametrized paths.
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "finsler/common.hpp"
#include "finsler/fields.hpp"
#include "finsler/geometry.hpp"
#include "finsler/randers.hpp"
#include "finsler/verify.hpp"

namespace finsler::geod {

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0.0;               // 0 = t_end / 40
  double initial_step = 1e-4;
  long max_steps = 500000;
  std::optional<double> fixed_step;    // bypasses error control when set
  std::vector<std::array<double, 2>> domain;  // optional x-box guard, empty = unbounded
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  double max_error_estimate = 0.0;
};

struct GeodesicTrace {
  std::string metric_id;
  int n = 0;
  std::vector<double> t;
  std::vector<double> x;  // row-major, n per sample
  std::vector<double> y;
  IntegratorStats stats;

  std::size_t samples() const { return t.size(); }
  const double* xs(std::size_t i) const { return &x[i * static_cast<std::size_t>(n)]; }
  const double* ys(std::size_t i) const { return &y[i * static_cast<std::size_t>(n)]; }
};

namespace detail {

struct Dp5 {
  // Dormand-Prince coefficients
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// Solves x'' = -2 G(x, x') from (x0, y0) to t_end and records every accepted
// step.  The right-hand side reuses the order-2 jet spray evaluation.
inline GeodesicTrace integrate_geodesic(const MetricField& metric, const std::vector<double>& x0,
                                        const std::vector<double>& y0, double t_end,
                                        const IntegratorConfig& cfg = {}) {
  const int n = metric.n;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(y0.size()) != n)
    throw Error(ErrorKind::config, "initial state dimension mismatch");
  if (!(t_end > 0.0)) throw Error(ErrorKind::config, "t_end must be positive");
  const std::size_t dim = static_cast<std::size_t>(2 * n);

  auto in_domain = [&](const std::vector<double>& z) {
    if (cfg.domain.empty()) return true;
    for (int i = 0; i < n; ++i) {
      double v = z[static_cast<std::size_t>(i)];
      if (v < cfg.domain[static_cast<std::size_t>(i)][0] || v > cfg.domain[static_cast<std::size_t>(i)][1]) return false;
    }
    return true;
  };

  auto rhs = [&](const std::vector<double>& z, std::vector<double>& dz) {
    std::vector<double> xs(z.begin(), z.begin() + n);
    std::vector<double> ys(z.begin() + n, z.end());
    std::vector<double> G = geom::spray(metric, xs, ys);
    for (int i = 0; i < n; ++i) {
      dz[static_cast<std::size_t>(i)] = ys[static_cast<std::size_t>(i)];
      dz[static_cast<std::size_t>(n + i)] = -2.0 * G[static_cast<std::size_t>(i)];
    }
  };

  GeodesicTrace trace;
  trace.metric_id = metric.id;
  trace.n = n;

  std::vector<double> z(dim);
  for (int i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)];
    z[static_cast<std::size_t>(n + i)] = y0[static_cast<std::size_t>(i)];
  }
  if (!in_domain(z)) throw Error(ErrorKind::numeric, "initial point outside the integration domain");

  auto record = [&](double t, const std::vector<double>& state) {
    trace.t.push_back(t);
    for (int i = 0; i < n; ++i) trace.x.push_back(state[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n; ++i) trace.y.push_back(state[static_cast<std::size_t>(n + i)]);
  };

  using detail::Dp5;
  const double hmax = cfg.fixed_step ? *cfg.fixed_step : (cfg.max_step > 0.0 ? cfg.max_step : t_end / 40.0);
  const double hmin = t_end * 1e-14;
  double h = cfg.fixed_step ? *cfg.fixed_step : std::min(cfg.initial_step, hmax);
  double t = 0.0;

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), ztmp(dim), znew(dim), err(dim);
  rhs(z, k1);
  record(0.0, z);

  while (t < t_end) {
    double remaining = t_end - t;
    if (remaining <= hmin) break;  // the endpoint is resolved to rounding
    if (trace.stats.steps + trace.stats.rejected >= cfg.max_steps)
      throw Error(ErrorKind::numeric, "integrator exceeded the step budget");
    h = std::min(h, remaining);
    if (h < hmin) throw Error(ErrorKind::numeric, "integrator step size underflow");

    auto stage = [&](const std::vector<std::pair<double, const std::vector<double>*>>& terms, std::vector<double>& out) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = z[i];
        for (const auto& [coeff, kv] : terms) acc += h * coeff * (*kv)[i];
        out[i] = acc;
      }
    };

    stage({{Dp5::a21, &k1}}, ztmp);
    rhs(ztmp, k2);
    stage({{Dp5::a31, &k1}, {Dp5::a32, &k2}}, ztmp);
    rhs(ztmp, k3);
    stage({{Dp5::a41, &k1}, {Dp5::a42, &k2}, {Dp5::a43, &k3}}, ztmp);
    rhs(ztmp, k4);
    stage({{Dp5::a51, &k1}, {Dp5::a52, &k2}, {Dp5::a53, &k3}, {Dp5::a54, &k4}}, ztmp);
    rhs(ztmp, k5);
    stage({{Dp5::a61, &k1}, {Dp5::a62, &k2}, {Dp5::a63, &k3}, {Dp5::a64, &k4}, {Dp5::a65, &k5}}, ztmp);
    rhs(ztmp, k6);
    stage({{Dp5::b1, &k1}, {Dp5::b3, &k3}, {Dp5::b4, &k4}, {Dp5::b5, &k5}, {Dp5::b6, &k6}}, znew);
    rhs(znew, k7);

    double err_norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      err[i] = h * (Dp5::e1 * k1[i] + Dp5::e3 * k3[i] + Dp5::e4 * k4[i] + Dp5::e5 * k5[i] + Dp5::e6 * k6[i] +
                    Dp5::e7 * k7[i]);
      double sc = cfg.atol + cfg.rtol * std::max(std::abs(z[i]), std::abs(znew[i]));
      double q = err[i] / sc;
      err_norm += q * q;
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(dim));
    trace.stats.max_error_estimate = std::max(trace.stats.max_error_estimate, err_norm);

    bool accept = cfg.fixed_step.has_value() || err_norm <= 1.0;
    if (accept) {
      t += h;
      z = znew;
      k1 = k7;  // first-same-as-last
      record(t, z);
      ++trace.stats.steps;
      if (!in_domain(z)) throw Error(ErrorKind::numeric, "trajectory left the integration domain");
    } else {
      ++trace.stats.rejected;
    }
    if (!cfg.fixed_step) {
      double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
      factor = std::min(5.0, std::max(0.2, factor));
      h = std::min(hmax, h * factor);
    }
  }
  return trace;
}

// Maximum relative drift of L(x(t), y(t)) along a trace.
inline double conservation_drift(const MetricField& metric, const GeodesicTrace& trace) {
  double L0 = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < trace.samples(); ++i) {
    std::vector<double> xs(trace.xs(i), trace.xs(i) + trace.n);
    std::vector<double> ys(trace.ys(i), trace.ys(i) + trace.n);
    double L = metric(xs, ys);
    if (i == 0)
      L0 = L;
    else
      worst = std::max(worst, std::abs(L - L0) / std::abs(L0));
  }
  return worst;
}

namespace detail {

// Cubic Hermite interpolation of x(t) on one trace segment, using the stored
// velocities as endpoint derivatives.
struct Segment {
  double t0, h;
  const double *x0, *x1, *y0, *y1;
  int n;

  void position(double theta, double* out) const {
    double t2 = theta * theta, t3 = t2 * theta;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    for (int i = 0; i < n; ++i) out[i] = h00 * x0[i] + h * h10 * y0[i] + h01 * x1[i] + h * h11 * y1[i];
  }

  void velocity(double theta, double* out) const {
    double t2 = theta * theta;
    double d00 = 6 * t2 - 6 * theta, d10 = 3 * t2 - 4 * theta + 1, d01 = -6 * t2 + 6 * theta, d11 = 3 * t2 - 2 * theta;
    for (int i = 0; i < n; ++i) out[i] = (d00 * x0[i] + h * d10 * y0[i] + d01 * x1[i] + h * d11 * y1[i]) / h;
  }
};

inline Segment segment(const GeodesicTrace& tr, std::size_t i) {
  return Segment{tr.t[i], tr.t[i + 1] - tr.t[i], tr.xs(i), tr.xs(i + 1), tr.ys(i), tr.ys(i + 1), tr.n};
}

// 4-point Gauss-Legendre nodes/weights on [0, 1].
inline constexpr std::array<double, 4> kGaussX = {0.069431844202973714, 0.33000947820757187, 0.66999052179242813,
                                                  0.93056815579702629};
inline constexpr std::array<double, 4> kGaussW = {0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                                  0.17392742256872693};

}  // namespace detail

// A trace together with its cumulative arc length under a reference metric,
// queryable as x(s).
class ArcLengthPath {
public:
  ArcLengthPath(const MetricField& reference, const GeodesicTrace& trace) : metric_(&reference), trace_(&trace) {
    const std::size_t m = trace.samples();
    if (m < 2) throw Error(ErrorKind::numeric, "trace too short to parametrize");
    cum_.resize(m, 0.0);
    std::vector<double> pos(static_cast<std::size_t>(trace.n)), vel(static_cast<std::size_t>(trace.n));
    for (std::size_t i = 0; i + 1 < m; ++i) {
      detail::Segment seg = detail::segment(trace, i);
      double ds = 0.0;
      for (int gq = 0; gq < 4; ++gq) {
        seg.position(detail::kGaussX[static_cast<std::size_t>(gq)], pos.data());
        seg.velocity(detail::kGaussX[static_cast<std::size_t>(gq)], vel.data());
        ds += detail::kGaussW[static_cast<std::size_t>(gq)] * speed(pos, vel);
      }
      cum_[i + 1] = cum_[i] + ds * seg.h;
    }
  }

  double length() const { return cum_.back(); }

  std::vector<double> position_at(double s) const {
    const std::size_t m = trace_->samples();
    s = std::min(std::max(s, 0.0), cum_.back());
    std::size_t lo = 0, hi = m - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] <= s)
        lo = mid;
      else
        hi = mid;
    }
    detail::Segment seg = detail::segment(*trace_, lo);
    double target = s - cum_[lo];
    // Newton on the in-segment arc length, bisection fallback
    double theta = (cum_[lo + 1] > cum_[lo]) ? target / (cum_[lo + 1] - cum_[lo]) : 0.0;
    double a = 0.0, b = 1.0;
    std::vector<double> pos(static_cast<std::size_t>(trace_->n)), vel(static_cast<std::size_t>(trace_->n));
    for (int it = 0; it < 40; ++it) {
      double f = partial_arc(seg, theta, pos, vel) - target;
      if (std::abs(f) < 1e-14 * (1.0 + cum_.back())) break;
      if (f > 0)
        b = theta;
      else
        a = theta;
      seg.position(theta, pos.data());
      seg.velocity(theta, vel.data());
      double sp = speed(pos, vel) * seg.h;
      double next = sp > 0 ? theta - f / sp : 0.5 * (a + b);
      theta = (next > a && next < b) ? next : 0.5 * (a + b);
    }
    seg.position(theta, pos.data());
    return pos;
  }

private:
  double speed(const std::vector<double>& pos, const std::vector<double>& vel) const { return (*metric_)(pos, vel); }

  double partial_arc(const detail::Segment& seg, double theta, std::vector<double>& pos, std::vector<double>& vel) const {
    if (theta <= 0.0) return 0.0;
    double acc = 0.0;
    for (int gq = 0; gq < 4; ++gq) {
      double u = theta * detail::kGaussX[static_cast<std::size_t>(gq)];
      seg.position(u, pos.data());
      seg.velocity(u, vel.data());
      acc += detail::kGaussW[static_cast<std::size_t>(gq)] * speed(pos, vel);
    }
    return acc * theta * seg.h;
  }

  const MetricField* metric_;
  const GeodesicTrace* trace_;
  std::vector<double> cum_;
};

struct PathComparison {
  double max_deviation = 0.0;
  double common_length = 0.0;
  int grid = 0;
};

// Compares the base and starred geodesics from the same initial data as
// unparametrized paths: both traces are reparametrized by base-metric arc
// length and sampled on a common grid.
inline PathComparison compare_geodesics(const randers::RandersBundle& bundle, const std::vector<double>& x0,
                                        const std::vector<double>& y0, double t_end, const IntegratorConfig& cfg = {},
                                        int grid = 256, GeodesicTrace* base_out = nullptr,
                                        GeodesicTrace* star_out = nullptr) {
  GeodesicTrace base = integrate_geodesic(bundle.base, x0, y0, t_end, cfg);
  GeodesicTrace star = integrate_geodesic(bundle.star, x0, y0, t_end, cfg);
  ArcLengthPath pb(bundle.base, base);
  ArcLengthPath ps(bundle.base, star);
  PathComparison cmp;
  cmp.common_length = std::min(pb.length(), ps.length());
  cmp.grid = grid;
  for (int k = 0; k <= grid; ++k) {
    double s = cmp.common_length * static_cast<double>(k) / static_cast<double>(grid);
    std::vector<double> a = pb.position_at(s);
    std::vector<double> b = ps.position_at(s);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    cmp.max_deviation = std::max(cmp.max_deviation, std::sqrt(d2));
  }
  if (base_out) *base_out = std::move(base);
  if (star_out) *star_out = std::move(star);
  return cmp;
}

// Maximum antisymmetry defect of the coordinate derivative matrix of b over
// a seeded sample of chart points.
inline double dJ_alpha_closedness(const OneFormField& form, const std::vector<std::array<double, 2>>& x_box,
                                  int samples, std::uint64_t seed) {
  const int n = form.dim();
  if (static_cast<int>(x_box.size()) != n) throw Error(ErrorKind::config, "x-box does not match the dimension");
  verify::Sampler rng(seed);
  auto space = JetSpace::get(n, 1);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<Jet> X(static_cast<std::size_t>(n)), Y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      X[static_cast<std::size_t>(i)] =
          Jet::variable(space, rng.uniform(x_box[static_cast<std::size_t>(i)][0], x_box[static_cast<std::size_t>(i)][1]), i, 1);
      Y[static_cast<std::size_t>(i)] = Jet(1.0);  // unused by the components
    }
    std::vector<Jet> b = form.eval(X, Y);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double dbij = b[static_cast<std::size_t>(j)].derivative(i).value();
        double dbji = b[static_cast<std::size_t>(i)].derivative(j).value();
        worst = std::max(worst, std::abs(dbij - dbji));
      }
  }
  return worst;
}

inline void write_trace_csv(const GeodesicTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot open trace output file '" + path + "'");
  auto fmt = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
  };
  out << "t";
  for (int i = 1; i <= trace.n; ++i) out << ",x" << i;
  for (int i = 1; i <= trace.n; ++i) out << ",y" << i;
  out << "\n";
  for (std::size_t s = 0; s < trace.samples(); ++s) {
    out << fmt(trace.t[s]);
    for (int i = 0; i < trace.n; ++i) out << "," << fmt(trace.xs(s)[i]);
    for (int i = 0; i < trace.n; ++i) out << "," << fmt(trace.ys(s)[i]);
    out << "\n";
  }
}

}  // namespace finsler::geod
