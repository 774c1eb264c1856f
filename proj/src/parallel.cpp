#include "porofft/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace porofft {

int configure_threads_from_env() {
  if (const char* s = std::getenv(kThreadsEnvVar)) {
    try {
      const int n = std::stoi(s);
      if (n > 0) set_max_threads(n);
    } catch (const std::exception&) {
      // ignore malformed values; the OpenMP default stays in effect
    }
  }
  return max_threads();
}

void set_max_threads(int n) { omp_set_num_threads(n > 0 ? n : 1); }

int max_threads() { return omp_get_max_threads(); }

}  // namespace porofft
