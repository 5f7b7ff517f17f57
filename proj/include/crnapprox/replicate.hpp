#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

namespace crn {

enum class Execution { serial, parallel };

/// Runs fn(i) for i = 0..count-1 and collects the results in index order.
/// The parallel path distributes indices over OpenMP threads; since every
/// replication derives its own RNG stream from its index, both paths return
/// identical results.  The first exception thrown by any replication is
/// rethrown after the loop.
template <class Fn>
auto replicate(std::size_t count, Execution execution, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> results(count);
  if (execution == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Number of OpenMP threads the parallel path will use (1 without OpenMP).
int parallel_threads();

}  // namespace crn
