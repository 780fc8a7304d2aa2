#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcn {

/// Runs fn(i) for i in [0, n). jobs <= 1 runs the plain serial loop, which is
/// the reference path the tests compare against. Iterations must be
/// independent and write only to their own slot.
template <typename Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
#ifdef _OPENMP
  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)jobs;
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace pcn
