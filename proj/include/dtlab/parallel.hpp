#pragma once

// Replicate loops: a serial reference and an OpenMP schedule that must give
// bit-identical per-replicate results.

#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dtlab {

enum class Schedule {
  Auto,      // DTLAB_THREADS if set, otherwise sequential
  Serial,    // reference path
  Parallel,  // DTLAB_THREADS if set, otherwise every available thread
};

inline constexpr const char* kThreadsVariable = "DTLAB_THREADS";

inline int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int resolve_threads(Schedule s) {
  if (s == Schedule::Serial) return 1;
  if (const char* env = std::getenv(kThreadsVariable); env && *env) {
    const int k = std::atoi(env);
    return k > 0 ? k : 1;
  }
  return s == Schedule::Parallel ? available_threads() : 1;
}

/// out[r] = fn(r) for r in [0, reps). fn must depend only on r.
template <class F>
auto run_replicates(int reps, Schedule schedule, F&& fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<R> out(static_cast<std::size_t>(reps));
  const int threads = resolve_threads(schedule);
  if (threads <= 1 || reps <= 1) {
    for (int r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }
#ifdef _OPENMP
  std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (int r = 0; r < reps; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = fn(r);
    } catch (...) {
#pragma omp critical(dtlab_replicate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (int r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = fn(r);
#endif
  return out;
}

}  // namespace dtlab
