#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace reglab {

// Worker count: REGLAB_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("REGLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Calls task(i) for every i in [0, count). Tasks are handed out in a fixed
// strided pattern; callers write results into slot i and reduce afterwards in
// index order, which keeps the outcome independent of the worker count.
namespace detail {
inline thread_local bool in_parallel_region = false;
}  // namespace detail

// Nested calls from inside a worker run serially.
template <class Task>
void parallel_for(std::size_t count, Task&& task) {
  const std::size_t workers =
      detail::in_parallel_region ? 1 : std::min<std::size_t>(thread_budget(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region = true;
      try {
        for (std::size_t i = w; i < count; i += workers) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace reglab
