// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include "finsler/common.hpp"
#include "finsler/jet.hpp"

namespace finsler {

enum class Slot : std::uint8_t { up, lo };

// Dense tensor with every axis of extent n.  The signature records the
// variance of each slot; it is carried along for report output and sanity
// checks, the numerics never branch on it.
template <class T>
class Tensor {
public:
  Tensor() : n_(0) {}

  Tensor(int n, std::vector<Slot> sig, const T& init = T{}) : n_(n), sig_(std::move(sig)) {
    std::size_t count = 1;
    for (std::size_t r = 0; r < sig_.size(); ++r) count *= static_cast<std::size_t>(n_);
    c_.assign(count, init);
  }

  int extent() const { return n_; }
  int rank() const { return static_cast<int>(sig_.size()); }
  const std::vector<Slot>& signature() const { return sig_; }
  const std::vector<T>& data() const { return c_; }
  std::vector<T>& data() { return c_; }

  // Signature string in the "upper slots, comma, lower slots" style, e.g. a
  // (1,2)-tensor prints as "u,ll".
  std::string signature_string() const {
    std::string up, lo;
    for (Slot s : sig_) (s == Slot::up ? up : lo) += (s == Slot::up ? 'u' : 'l');
    if (up.empty()) return lo;
    if (lo.empty()) return up;
    return up + "," + lo;
  }

  template <class... I>
  T& at(I... idx) {
    return c_[flat(idx...)];
  }
  template <class... I>
  const T& at(I... idx) const {
    return c_[flat(idx...)];
  }

private:
  template <class... I>
  std::size_t flat(I... idx) const {
    static_assert(sizeof...(I) > 0);
    const int ii[] = {static_cast<int>(idx)...};
    std::size_t f = 0;
    for (std::size_t k = 0; k < sizeof...(I); ++k) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(ii[k]);
    return f;
  }

  int n_;
  std::vector<Slot> sig_;
  std::vector<T> c_;
};

inline Tensor<double> values(const Tensor<Jet>& t) {
  Tensor<double> r(t.extent(), t.signature());
  for (std::size_t i = 0; i < t.data().size(); ++i) r.data()[i] = t.data()[i].value();
  return r;
}

inline double max_abs(const Tensor<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const Tensor<Jet>& t) {
  double m = 0.0;
  for (const Jet& v : t.data()) m = std::max(m, std::abs(v.value()));
  return m;
}

// Relative residual between two tensors of identical shape: the largest
// componentwise deviation divided by (1 + largest magnitude involved).
template <class T>
double rel_residual(const Tensor<T>& lhs, const Tensor<T>& rhs) {
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < lhs.data().size(); ++i) {
    double a, b;
    if constexpr (std::is_same_v<T, Jet>) {
      a = lhs.data()[i].value();
      b = rhs.data()[i].value();
    } else {
      a = lhs.data()[i];
      b = rhs.data()[i];
    }
    dev = std::max(dev, std::abs(a - b));
    scale = std::max({scale, std::abs(a), std::abs(b)});
  }
  return dev / (1.0 + scale);
}

template <class T>
double vanishing_residual(const Tensor<T>& t) {
  double m = max_abs(t);
  return m / (1.0 + m);
}

}  // namespace finsler
