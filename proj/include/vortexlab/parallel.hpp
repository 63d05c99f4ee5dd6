#pragma once

// Thread-count control and order-stable reductions shared by the grid kernels.

#include <cstddef>
#include <span>
#include <vector>

namespace vortexlab {

/// Caps OpenMP workers; n < 1 is rejected with InvalidParameter.
void set_thread_count(int n);
int thread_count();

/// Reads VORTEXLAB_THREADS if set and applies it. Throws InvalidParameter for
/// values that are not integers >= 1. Returns the active worker count.
int configure_threads_from_env();

/// Sum of a partial-sum array in index order. Kernels fill one partial per
/// grid row in parallel and reduce here, so results do not depend on the
/// number of threads.
inline double ordered_sum(std::span<const double> partials) {
  double s = 0.0;
  for (double x : partials) s += x;
  return s;
}

/// Dot product over fixed-size blocks, reduced in block order.
double stable_dot(std::span<const double> a, std::span<const double> b);

/// Largest absolute entry.
double max_abs(std::span<const double> a);

}  // namespace vortexlab
