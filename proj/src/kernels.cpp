#include "heavycomb/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace heavycomb {

int default_threads() {
  if (const char* env = std::getenv("HEAVYCOMB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

int resolve_threads(const Exec& exec) { return exec.threads > 0 ? exec.threads : default_threads(); }

}  // namespace heavycomb
