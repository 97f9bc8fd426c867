#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace selftrain {

// Runs fn(i) for i in [0, n) across `workers` threads. Callers must write
// results into per-index slots; merge order is then up to the caller, which
// keeps outputs independent of the worker count.
template <typename Fn>
void parallel_for(size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned t = static_cast<unsigned>(std::min<size_t>(workers, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += t) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline constexpr size_t kReduceChunk = 4096;

// Chunked sum with a fixed chunk size and index-ordered combine, so the
// floating point result does not depend on the worker count.
template <typename Fn>
double deterministic_sum(size_t n, unsigned workers, Fn&& term) {
  if (n == 0) return 0.0;
  const size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, workers, [&](size_t c) {
    const size_t lo = c * kReduceChunk;
    const size_t hi = std::min(n, lo + kReduceChunk);
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace selftrain
