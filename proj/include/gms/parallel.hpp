#pragma once

// Replica-parallel loops. Every replica writes only its own output slot, so
// results never depend on the thread count or on scheduling.

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gms {

/// 0 means "use GMS_THREADS if set, else all hardware threads".
int resolve_thread_count(int requested);

/// Serial reference loop: body(i) for i in [0, count).
template <class Body>
void for_each_replica_serial(std::int64_t count, Body&& body) {
  for (std::int64_t i = 0; i < count; ++i) {
    body(i);
  }
}

/// OpenMP loop with the same contract as for_each_replica_serial.
template <class Body>
void for_each_replica(std::int64_t count, int threads, Body&& body) {
  const int nthreads = resolve_thread_count(threads);
  if (nthreads <= 1 || count <= 1) {
    for_each_replica_serial(count, body);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::int64_t i = 0; i < count; ++i) {
    body(i);
  }
#else
  for_each_replica_serial(count, body);
#endif
}

}  // namespace gms
