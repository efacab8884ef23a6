#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace holoimg::detail {

/// Runs fn(i) for i in [0, n) on the OpenMP team. The first exception thrown by any
/// iteration is rethrown on the calling thread once the loop has finished.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, bool dynamic = false) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
  auto body = [&](std::ptrdiff_t i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace holoimg::detail
