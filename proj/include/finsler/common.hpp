// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace finsler {

enum class ErrorKind {
  syntax,     // malformed expression source
  domain,     // evaluation outside a function's domain (sqrt/log/div)
  config,     // bad run configuration
  instance,   // degenerate metric / inadmissible point / bad instance data
  jet_order,  // a derivative was requested beyond the available jet order
  numeric     // integrator breakdown and similar runtime failures
};

class Error : public std::runtime_error {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorKind kind, std::string message, std::size_t offset = npos)
      : std::runtime_error(std::move(message)), kind_(kind), offset_(offset) {}

  ErrorKind kind() const { return kind_; }

  // Byte offset into the source text, for syntax errors only.
  std::size_t offset() const { return offset_; }

private:
  ErrorKind kind_;
  std::size_t offset_;
};

// A point of the slit tangent bundle: chart coordinates x and a nonzero
// tangent vector y attached at x.
struct SlitPoint {
  std::vector<double> x;
  std::vector<double> y;

  SlitPoint() = default;
  SlitPoint(std::vector<double> x_, std::vector<double> y_)
      : x(std::move(x_)), y(std::move(y_)) {}

  std::size_t dim() const { return x.size(); }

  bool valid() const {
    if (x.size() != y.size() || x.empty()) return false;
    double n2 = 0.0;
    for (double v : y) n2 += v * v;
    return n2 > 0.0;
  }
};

inline std::size_t thread_count() {
  if (const char* env = std::getenv("FINSLER_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Runs fn(i) for i in [0, count). Work is chunked by index; results must be
// written to index-addressed storage so the outcome is independent of the
// thread count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = std::min(thread_count(), count == 0 ? std::size_t{1} : count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr err;
  std::mutex err_mutex;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace finsler
