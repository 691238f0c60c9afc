#include "symorb/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace symorb::kernels {

namespace {

std::atomic<int> override_workers{0};

}  // namespace

int workers() {
  if (const int n = override_workers.load(); n > 0) return n;
  if (const char* env = std::getenv("SYMORB_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_workers(int n) { override_workers.store(n > 0 ? n : 0); }

}  // namespace symorb::kernels
