#pragma once

#include <cstddef>

namespace fvstag {

// Worker count, capped by the FVSTAG_THREADS environment variable. Returns 1
// when built without OpenMP.
int worker_count();

// Applies f(i) for i in [0, n). Iterations must write disjoint outputs.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
#if defined(FVSTAG_USE_OPENMP)
#pragma omp parallel for schedule(static) num_threads(worker_count()) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

}  // namespace fvstag
