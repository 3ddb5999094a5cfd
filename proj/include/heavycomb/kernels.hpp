#pragma once

#include <cstdint>
#include <exception>

namespace heavycomb {

/// Replicates are processed in fixed-size chunks; each chunk draws from its
/// own generator and writes only its own slots, so the output is the same
/// for any thread count, including the serial reference path.
inline constexpr std::int64_t kChunkSize = 2048;

struct Exec {
  bool parallel = true;
  int threads = 0;  // 0: default_threads()
};

/// HEAVYCOMB_THREADS if set to a positive integer, else the OpenMP default.
int default_threads();

inline std::int64_t chunk_count(std::int64_t reps) { return (reps + kChunkSize - 1) / kChunkSize; }

int resolve_threads(const Exec& exec);

/// body(chunk, begin, end) for every chunk of [0, reps).
template <class Body>
void for_each_chunk(std::int64_t reps, const Exec& exec, Body&& body) {
  const std::int64_t chunks = chunk_count(reps);
  if (!exec.parallel) {
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t begin = c * kChunkSize;
      const std::int64_t end = begin + kChunkSize < reps ? begin + kChunkSize : reps;
      body(c, begin, end);
    }
    return;
  }
  const int threads = resolve_threads(exec);
  // Exceptions may not leave the parallel region; the first one is rethrown.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t end = begin + kChunkSize < reps ? begin + kChunkSize : reps;
    try {
      body(c, begin, end);
    } catch (...) {
#pragma omp critical(heavycomb_chunk_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace heavycomb
