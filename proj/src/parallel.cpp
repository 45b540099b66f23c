#include "abcmc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace abcmc {

namespace {

std::size_t g_max_threads = 0;  // 0 means "not set explicitly"

thread_local bool g_inside_worker = false;

std::size_t env_thread_cap() {
  const char* raw = std::getenv("ABCMC_THREADS");
  if (raw == nullptr) return 0;
  const long parsed = std::strtol(raw, nullptr, 10);
  return parsed > 0 ? static_cast<std::size_t>(parsed) : 0;
}

}  // namespace

void set_max_threads(std::size_t n) { g_max_threads = n; }

std::size_t max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  const std::size_t env = env_thread_cap();
  if (env > 0) return env;
  const std::size_t hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  // Nested calls run inline so worker counts never multiply.
  const std::size_t workers = g_inside_worker ? 1 : std::min(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    g_inside_worker = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  g_inside_worker = false;
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace abcmc
