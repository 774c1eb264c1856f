#pragma once

#include <cstddef>

namespace porofft {

/// Name of the environment variable that caps internal threading.
inline constexpr const char* kThreadsEnvVar = "POROFFT_NUM_THREADS";

/// Loops shorter than this run on the calling thread.
inline constexpr std::ptrdiff_t kParallelGrain = std::ptrdiff_t{1} << 15;

/// Applies POROFFT_NUM_THREADS (if set and positive) as the OpenMP thread cap.
/// Returns the resulting cap.
int configure_threads_from_env();

void set_max_threads(int n);
int max_threads();

}  // namespace porofft
