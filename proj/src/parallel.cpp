#include "mta/parallel.hpp"

#ifdef MTA_HAVE_OPENMP
#include <omp.h>
#endif

namespace mta::parallel {

namespace {
int g_threads = 1;
}

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }

int threads() { return g_threads; }

void for_index_serial(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

void for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
#ifdef MTA_HAVE_OPENMP
  if (g_threads > 1 && n > 1) {
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(g_threads)
    for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
    return;
  }
#endif
  for_index_serial(n, fn);
}

}  // namespace mta::parallel
