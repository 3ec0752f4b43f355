#pragma once

// Shared scalar aliases, error type, and a tiny deterministic worker pool.

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace coorbit {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// Thrown on violated preconditions and unsatisfiable numeric contracts.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

namespace par {

// Process-wide worker count; 0 or 1 means run inline.
inline std::atomic<int>& thread_count() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_threads(int n) { thread_count().store(n < 1 ? 1 : n); }

// Static chunking over [0, n): each worker owns a contiguous range, so
// results are written to disjoint slots and runs are deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int workers = thread_count().load();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t w = static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(w);
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace par

// Exponent from [1, inf]; infinity encodes the sup norm.
inline bool is_sup(double p) { return p == kInf; }

inline void check_exponent(double p, const char* name) {
  require(p >= 1.0, std::string(name) + " must lie in [1, inf]");
}

}  // namespace coorbit
