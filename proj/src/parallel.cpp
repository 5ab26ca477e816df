#include "prandtl/parallel.hpp"

#include <algorithm>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prandtl {

static int g_threads = 1;

void set_threads(int n) {
  int hw = (int)std::thread::hardware_concurrency();
  if (hw <= 0) hw = 1;
  g_threads = n <= 0 ? hw : std::min(n, hw);
}

int threads() { return g_threads; }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
#ifdef _OPENMP
  if (g_threads > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(g_threads)
    for (long long i = 0; i < (long long)n; ++i) fn((size_t)i);
    return;
  }
#endif
  for (size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace prandtl
