#pragma once

// Data-parallel helpers. Each kernel has a serial reference path and an
// OpenMP path; results are written per index and reduced serially, so both
// paths return bit-identical values.

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace symorb::kernels {

enum class Exec { serial, parallel };

/// Worker count for parallel kernels: set_workers() if called, else the
/// SYMORB_WORKERS environment variable, else the OpenMP default.
int workers();
void set_workers(int n);

template <class F>
auto map(std::size_t n, F&& f, Exec exec = Exec::parallel) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers())
  for (long long i = 0; i < count; ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct GridExtremum {
  double value = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  std::size_t index = 0;
  double lipschitz = 0.0;  // max |f(x_{i+1}) - f(x_i)| / h over the grid
  std::size_t points = 0;
};

/// Maximum of f on the uniform grid a + i (b - a) / n, i = 0..n-1 (the right
/// endpoint is excluded).
template <class F>
GridExtremum grid_max(F&& f, double a, double b, std::size_t n, Exec exec = Exec::parallel) {
  const double h = (b - a) / static_cast<double>(n);
  const std::vector<double> vals = map(n, [&](std::size_t i) { return f(a + h * static_cast<double>(i)); }, exec);
  GridExtremum g;
  g.points = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (vals[i] > g.value) {
      g.value = vals[i];
      g.index = i;
      g.arg = a + h * static_cast<double>(i);
    }
    if (i > 0) g.lipschitz = std::max(g.lipschitz, std::abs(vals[i] - vals[i - 1]) / h);
  }
  return g;
}

}  // namespace symorb::kernels
