#pragma once

#include <cstddef>
#include <functional>

namespace abcmc {

// Worker cap: explicit setter wins, then the ABCMC_THREADS environment
// variable, then hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs fn(i) for i in [0, n). Work is striped over a fixed number of
// workers; any exception is rethrown on the calling thread. Callers must
// make fn(i) independent of scheduling (per-index seeds, disjoint writes).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace abcmc
