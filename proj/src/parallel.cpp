#include "vortexlab/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {
constexpr std::size_t kBlock = 4096;
}

void set_thread_count(int n) {
  if (n < 1) throw InvalidParameter("thread count must be >= 1");
  omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

int configure_threads_from_env() {
  const char* raw = std::getenv("VORTEXLAB_THREADS");
  if (raw == nullptr || *raw == '\0') return thread_count();
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096)
    throw InvalidParameter(std::string("VORTEXLAB_THREADS must be an integer >= 1, got '") + raw +
                           "'");
  set_thread_count(static_cast<int>(v));
  return thread_count();
}

double stable_dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(blocks); ++k) {
    const std::size_t lo = static_cast<std::size_t>(k) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[static_cast<std::size_t>(k)] = s;
  }
  return ordered_sum(partial);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.size()); ++i)
    m = std::max(m, std::abs(a[static_cast<std::size_t>(i)]));
  return m;
}

}  // namespace vortexlab
