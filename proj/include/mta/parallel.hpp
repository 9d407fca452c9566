#pragma once

#include <cstddef>
#include <functional>

namespace mta::parallel {

// Global worker count. 1 selects the serial reference path; n > 1 runs the
// OpenMP kernels. Results are identical either way: parallel loops only do
// per-index writes and any reduction is merged in index order.
void set_threads(int n);
int threads();

// Runs fn(i) for i in [0, n). Serial when threads() == 1 or n is tiny.
void for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

// Serial reference for tests and the benchmark harness.
void for_index_serial(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mta::parallel
