#include "wgqed/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace wgqed {

namespace {
std::atomic<std::size_t> g_threads{0};
}

void set_thread_count(std::size_t n) { g_threads = n; }

std::size_t thread_count() {
  if (const auto n = g_threads.load(); n > 0) return n;
  if (const char* env = std::getenv("WGQED_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t min_chunk, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t chunk = std::max<std::size_t>(1, min_chunk);
  const std::size_t tasks = std::min(thread_count(), (n + chunk - 1) / chunk);
  if (tasks <= 1) {
    body(0, n);
    return;
  }
  const std::size_t per = (n + tasks - 1) / tasks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(tasks);
  for (std::size_t t = 0; t < tasks; ++t) {
    const std::size_t b = t * per;
    const std::size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&, t, b, e] {
      try {
        body(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace wgqed
