// SPDX-License-Identifier: Apache-2.0
//
// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet stores the Taylor coefficients of a smooth function of m seed
// variables around a point, complete up to a total degree `order`.  All
// arithmetic and the elementary functions propagate coefficients exactly,
// so extracting a coefficient yields the exact partial derivative (up to
// floating-point rounding) with no truncation error.  Differentiating a
// jet is a coefficient shift and lowers the order by one; once the order
// reaches zero only the value remains.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsler/common.hpp"

namespace finsler {

namespace detail {
inline std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace detail

// Shared immutable tables for a fixed number of seed variables and a maximal
// total degree: the graded monomial layout, derivative shifts, and the
// convolution pair lists used by multiplication.
class JetSpace {
public:
  struct ConvPair {
    std::uint32_t a, b;
  };

  static std::shared_ptr<const JetSpace> get(int vars, int max_order);

  int vars() const { return vars_; }
  int max_order() const { return max_order_; }

  // Number of coefficients with total degree <= order.
  std::size_t size(int order) const { return offsets_[static_cast<std::size_t>(order) + 1]; }

  int degree(std::size_t idx) const { return degree_[idx]; }

  const std::uint8_t* exponents(std::size_t idx) const { return &expo_[idx * vars_]; }

  // Index of alpha + e_var, or npos when that exceeds max_order.
  std::size_t shift(int var, std::size_t idx) const { return shift_[static_cast<std::size_t>(var) * count_ + idx]; }

  // Ordered (a, b) pairs with alpha_a + alpha_b equal to the target monomial.
  const std::vector<ConvPair>& conv(std::size_t target) const { return conv_[target]; }

  std::size_t index_of(const std::vector<int>& alpha) const;

  JetSpace(int vars, int max_order);  // use get(); public for make_shared

private:
  int vars_;
  int max_order_;
  std::size_t count_;
  std::vector<std::size_t> offsets_;  // offsets_[d] = #monomials of degree < d
  std::vector<std::uint8_t> expo_;
  std::vector<int> degree_;
  std::vector<std::size_t> shift_;
  std::vector<std::vector<ConvPair>> conv_;
};

inline JetSpace::JetSpace(int vars, int max_order) : vars_(vars), max_order_(max_order) {
  offsets_.assign(static_cast<std::size_t>(max_order) + 2, 0);
  // Enumerate monomials degree by degree, lexicographically within a degree.
  std::vector<std::vector<std::uint8_t>> monos;
  for (int d = 0; d <= max_order; ++d) {
    offsets_[static_cast<std::size_t>(d)] = monos.size();
    // generate all exponent vectors with sum == d
    std::vector<std::uint8_t> alpha(static_cast<std::size_t>(vars), 0);
    // recursive enumeration without recursion: odometer over first vars-1 slots
    std::function<void(int, int)> rec = [&](int slot, int rem) {
      if (slot == vars - 1) {
        alpha[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(rem);
        monos.push_back(alpha);
        return;
      }
      for (int e = rem; e >= 0; --e) {
        alpha[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(e);
        rec(slot + 1, rem - e);
      }
    };
    rec(0, d);
    offsets_[static_cast<std::size_t>(d) + 1] = monos.size();
  }
  count_ = monos.size();
  expo_.resize(count_ * static_cast<std::size_t>(vars));
  degree_.resize(count_);
  std::unordered_map<std::string, std::size_t> lookup;
  lookup.reserve(count_ * 2);
  for (std::size_t i = 0; i < count_; ++i) {
    int d = 0;
    for (int v = 0; v < vars; ++v) {
      expo_[i * static_cast<std::size_t>(vars) + static_cast<std::size_t>(v)] = monos[i][static_cast<std::size_t>(v)];
      d += monos[i][static_cast<std::size_t>(v)];
    }
    degree_[i] = d;
    lookup.emplace(std::string(monos[i].begin(), monos[i].end()), i);
  }
  // derivative shift tables
  shift_.assign(static_cast<std::size_t>(vars) * count_, Error::npos);
  std::string key(static_cast<std::size_t>(vars), '\0');
  for (std::size_t i = 0; i < count_; ++i) {
    for (int v = 0; v < vars; ++v) {
      if (degree_[i] >= max_order) continue;
      for (int w = 0; w < vars; ++w) key[static_cast<std::size_t>(w)] = static_cast<char>(monos[i][static_cast<std::size_t>(w)] + (w == v ? 1 : 0));
      auto it = lookup.find(key);
      if (it != lookup.end()) shift_[static_cast<std::size_t>(v) * count_ + i] = it->second;
    }
  }
  // convolution pairs grouped by target
  conv_.resize(count_);
  for (std::size_t a = 0; a < count_; ++a) {
    for (std::size_t b = 0; b < count_; ++b) {
      if (degree_[a] + degree_[b] > max_order) continue;
      for (int w = 0; w < vars; ++w)
        key[static_cast<std::size_t>(w)] = static_cast<char>(monos[a][static_cast<std::size_t>(w)] + monos[b][static_cast<std::size_t>(w)]);
      std::size_t tgt = lookup.at(key);
      conv_[tgt].push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
    }
  }
}

inline std::size_t JetSpace::index_of(const std::vector<int>& alpha) const {
  for (std::size_t i = 0; i < count_; ++i) {
    bool ok = true;
    for (int v = 0; v < vars_; ++v)
      if (expo_[i * static_cast<std::size_t>(vars_) + static_cast<std::size_t>(v)] != alpha[static_cast<std::size_t>(v)]) {
        ok = false;
        break;
      }
    if (ok) return i;
  }
  return Error::npos;
}

inline std::shared_ptr<const JetSpace> JetSpace::get(int vars, int max_order) {
  if (vars < 1 || max_order < 0) throw Error(ErrorKind::config, "jet space needs vars >= 1 and order >= 0");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(vars, max_order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto space = std::make_shared<const JetSpace>(vars, max_order);
  cache.emplace(key, space);
  return space;
}

// Truncated Taylor scalar.  A Jet is either attached to a JetSpace or is a
// plain constant (space() == nullptr); constants combine with jets of any
// space, which lets numeric literals flow through generic code unchanged.
class Jet {
public:
  Jet() : value_(0.0) {}
  explicit Jet(double v) : value_(v) {}

  static Jet constant(double v) { return Jet(v); }

  static Jet constant(std::shared_ptr<const JetSpace> space, double v, int order) {
    Jet j;
    j.attach(std::move(space), order);
    j.c_[0] = v;
    return j;
  }

  static Jet variable(std::shared_ptr<const JetSpace> space, double v, int var, int order) {
    if (var < 0 || var >= space->vars()) throw Error(ErrorKind::config, "seed variable out of range");
    Jet j;
    j.attach(std::move(space), order);
    j.c_[0] = v;
    // The degree-1 block lists e_0, e_1, ... in variable order.
    if (order >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
  }

  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  bool is_constant() const { return space_ == nullptr; }
  int order() const { return space_ ? order_ : kConstOrder; }
  double value() const { return space_ ? c_[0] : value_; }

  // Exact partial derivative for the multi-index alpha (one entry per seed
  // variable): Taylor coefficient times the factorial weight.
  double partial(const std::vector<int>& alpha) const;

  Jet derivative(int var) const;

  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator-(const Jet& a) {
    Jet r = a;
    if (r.space_) {
      for (double& v : r.c_) v = -v;
    } else {
      r.value_ = -r.value_;
    }
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  friend Jet operator+(const Jet& a, double s) { return a + Jet(s); }
  friend Jet operator+(double s, const Jet& a) { return Jet(s) + a; }
  friend Jet operator-(const Jet& a, double s) { return a - Jet(s); }
  friend Jet operator-(double s, const Jet& a) { return Jet(s) - a; }
  friend Jet operator*(const Jet& a, double s);
  friend Jet operator*(double s, const Jet& a) { return a * s; }
  friend Jet operator/(const Jet& a, double s);
  friend Jet operator/(double s, const Jet& a) { return Jet(s) / a; }

  // Composes the univariate series with coefficient callback coeff(p) =
  // f^(p)(value()) / p!, via Horner evaluation in (jet - value).
  Jet compose(const std::function<double(int)>& coeff) const;

  const std::vector<double>& coeffs() const { return c_; }

private:
  static constexpr int kConstOrder = 1 << 20;

  void attach(std::shared_ptr<const JetSpace> space, int order) {
    if (order < 0 || order > space->max_order()) throw Error(ErrorKind::config, "jet order out of range for space");
    order_ = order;
    c_.assign(space->size(order), 0.0);
    space_ = std::move(space);
  }

  std::shared_ptr<const JetSpace> space_;
  int order_ = 0;
  double value_ = 0.0;       // used when space_ == nullptr
  std::vector<double> c_;    // graded coefficients when attached
};

inline double Jet::partial(const std::vector<int>& alpha) const {
  int deg = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (!space_) {
    if (deg == 0) return value_;
    return 0.0;
  }
  if (static_cast<int>(alpha.size()) != space_->vars()) throw Error(ErrorKind::config, "multi-index size mismatch");
  if (deg > order_) throw Error(ErrorKind::jet_order, "partial derivative beyond available jet order");
  std::size_t idx = space_->index_of(alpha);
  double fact = 1.0;
  for (int a : alpha)
    for (int i = 2; i <= a; ++i) fact *= i;
  return c_[idx] * fact;
}

inline Jet Jet::derivative(int var) const {
  if (!space_) return Jet(0.0);
  if (order_ < 1) throw Error(ErrorKind::jet_order, "jet order insufficient for a further derivative");
  if (var < 0 || var >= space_->vars()) throw Error(ErrorKind::config, "derivative variable out of range");
  Jet r;
  r.attach(space_, order_ - 1);
  const std::size_t n = r.c_.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t src = space_->shift(var, i);
    r.c_[i] = c_[src] * (space_->exponents(i)[var] + 1);
  }
  return r;
}

inline Jet Jet::truncated(int order) const {
  if (!space_ || order >= order_) return *this;
  if (order < 0) throw Error(ErrorKind::jet_order, "cannot truncate below order 0");
  Jet r;
  r.attach(space_, order);
  std::copy(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(r.c_.size()), r.c_.begin());
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  if (!a.space_ && !b.space_) return Jet(a.value_ + b.value_);
  if (!a.space_) {
    Jet r = b;
    r.c_[0] += a.value_;
    return r;
  }
  if (!b.space_) {
    Jet r = a;
    r.c_[0] += b.value_;
    return r;
  }
  int k = std::min(a.order_, b.order_);
  Jet r = (a.order_ == k) ? a : a.truncated(k);
  const Jet& bb = (b.order_ == k) ? b : b.truncated(k);
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += bb.c_[i];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  if (!a.space_ && !b.space_) return Jet(a.value_ - b.value_);
  if (!a.space_) {
    Jet r = -b;
    r.c_[0] += a.value_;
    return r;
  }
  if (!b.space_) {
    Jet r = a;
    r.c_[0] -= b.value_;
    return r;
  }
  int k = std::min(a.order_, b.order_);
  Jet r = (a.order_ == k) ? a : a.truncated(k);
  const Jet& bb = (b.order_ == k) ? b : b.truncated(k);
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= bb.c_[i];
  return r;
}

inline Jet operator*(const Jet& a, double s) {
  Jet r = a;
  if (r.space_) {
    for (double& v : r.c_) v *= s;
  } else {
    r.value_ *= s;
  }
  return r;
}

inline Jet operator/(const Jet& a, double s) {
  if (s == 0.0) throw Error(ErrorKind::domain, "division by zero");
  return a * (1.0 / s);
}

inline Jet operator*(const Jet& a, const Jet& b) {
  if (!a.space_) return b * a.value_;
  if (!b.space_) return a * b.value_;
  int k = std::min(a.order_, b.order_);
  const Jet& aa = (a.order_ == k) ? a : a.truncated(k);
  const Jet& bb = (b.order_ == k) ? b : b.truncated(k);
  const JetSpace& sp = *aa.space_;
  Jet r;
  r.attach(aa.space_, k);
  const std::size_t n = r.c_.size();
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (const JetSpace::ConvPair& pr : sp.conv(t)) acc += aa.c_[pr.a] * bb.c_[pr.b];
    r.c_[t] = acc;
  }
  return r;
}

inline Jet Jet::compose(const std::function<double(int)>& coeff) const {
  if (!space_) return Jet(coeff(0));
  Jet t = *this;
  t.c_[0] = 0.0;  // nilpotent part
  Jet r = Jet::constant(space_, coeff(order_), order_);
  for (int p = order_ - 1; p >= 0; --p) {
    r = r * t;
    r.c_[0] += coeff(p);
  }
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (!b.space_) {
    if (b.value_ == 0.0) throw Error(ErrorKind::domain, "division by zero");
    return a * (1.0 / b.value_);
  }
  double b0 = b.value();
  if (b0 == 0.0) throw Error(ErrorKind::domain, "division by zero");
  // 1/(b0 + t) expanded around t = 0, then multiplied by a.
  double inv = 1.0 / b0;
  Jet recip = b.compose([inv](int p) {
    double c = inv;
    for (int i = 0; i < p; ++i) c *= -inv;
    return c;
  });
  return a * recip;
}

inline Jet sqrt(const Jet& u) {
  double u0 = u.value();
  if (u0 <= 0.0) throw Error(ErrorKind::domain, "sqrt of non-positive value");
  if (u.is_constant()) return Jet(std::sqrt(u0));
  double s = std::sqrt(u0);
  return u.compose([s, u0](int p) {
    // d^p/du^p sqrt(u) / p!  =  s * binom(1/2, p) / u0^p
    double c = s;
    double num = 0.5;
    for (int i = 0; i < p; ++i) {
      c *= num / (u0 * (i + 1));
      num -= 1.0;
    }
    return c;
  });
}

inline Jet exp(const Jet& u) {
  double e = std::exp(u.value());
  if (u.is_constant()) return Jet(e);
  return u.compose([e](int p) {
    double c = e;
    for (int i = 1; i <= p; ++i) c /= i;
    return c;
  });
}

inline Jet log(const Jet& u) {
  double u0 = u.value();
  if (u0 <= 0.0) throw Error(ErrorKind::domain, "log of non-positive value");
  if (u.is_constant()) return Jet(std::log(u0));
  return u.compose([u0](int p) {
    if (p == 0) return std::log(u0);
    // (-1)^(p-1) / (p * u0^p)
    double c = 1.0 / p;
    for (int i = 0; i < p; ++i) c /= u0;
    return (p % 2 == 0) ? -c : c;
  });
}

inline Jet sin(const Jet& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  if (u.is_constant()) return Jet(s);
  return u.compose([s, c](int p) {
    static const int sign[4] = {1, 1, -1, -1};
    double base = (p % 2 == 0) ? s : c;
    double v = sign[p % 4] * base;
    for (int i = 1; i <= p; ++i) v /= i;
    return v;
  });
}

inline Jet cos(const Jet& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  if (u.is_constant()) return Jet(c);
  return u.compose([s, c](int p) {
    static const int sign[4] = {1, -1, -1, 1};
    double base = (p % 2 == 0) ? c : s;
    double v = sign[p % 4] * base;
    for (int i = 1; i <= p; ++i) v /= i;
    return v;
  });
}

// Integer exponent: repeated multiplication, valid for any base value.
inline Jet pow(const Jet& u, long long e) {
  if (e == 0) return Jet(1.0);
  bool neg = e < 0;
  unsigned long long k = neg ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  Jet acc(1.0);
  Jet base = u;
  while (k) {
    if (k & 1ull) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  if (neg) return Jet(1.0) / acc;
  return acc;
}

// Non-integer exponent lowers to exp(e * log(u)); requires u > 0.
inline Jet pow(const Jet& u, double e) {
  double r = std::round(e);
  if (r == e && std::abs(e) <= 64.0) return pow(u, static_cast<long long>(r));
  return exp(log(u) * e);
}

}  // namespace finsler
