#include "fvstag/parallel.hpp"

#include <cstdlib>
#include <string>

#if defined(FVSTAG_USE_OPENMP)
#include <omp.h>
#endif

namespace fvstag {

int worker_count() {
  static const int count = [] {
    int n = 1;
#if defined(FVSTAG_USE_OPENMP)
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("FVSTAG_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap > 0 && cap < n) n = cap;
      } catch (const std::exception&) {
      }
    }
    return n;
  }();
  return count;
}

}  // namespace fvstag
