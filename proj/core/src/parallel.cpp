#include "roughflow/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <mutex>
#include <string>

namespace roughflow {

int configured_threads() {
  if (const char* env = std::getenv("ZL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

void apply_thread_config() { omp_set_num_threads(configured_threads()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace roughflow
