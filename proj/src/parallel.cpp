#include "mono3d/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mono3d {

int max_threads() {
  if (const char* env = std::getenv("MONO3D_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mono3d
