#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace kemeny {

/// Execution policy for the data-parallel kernels. `Serial` is the reference
/// path; `Parallel` distributes loop iterations with OpenMP. Both produce
/// bitwise-identical results because every iteration writes its own slot and
/// all reductions happen afterwards in index order.
enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, count). If any iteration throws, the exception of
/// the lowest failing index is rethrown once the loop finishes.
template <typename Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  if (exec == Exec::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kemeny
