#pragma once

#include <cstdint>
#include <exception>
#include <vector>

namespace spuct {

/// Counter-based stream derivation: the seed of work item `index` in `stream`
/// depends only on (master, stream, index), never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Reference runner: items 0..n-1 in order on the calling thread.
template <typename Result, typename Fn>
std::vector<Result> run_indexed_serial(std::size_t n, Fn&& fn) {
  std::vector<Result> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
  return out;
}

/// OpenMP runner with `workers` threads. Each item writes only its own slot,
/// so the returned vector is identical to run_indexed_serial for any worker
/// count. The first exception (lowest index) is rethrown after the loop.
template <typename Result, typename Fn>
std::vector<Result> run_indexed_parallel(std::size_t n, int workers, Fn&& fn) {
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : 1)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Serial for workers <= 1, OpenMP otherwise.
template <typename Result, typename Fn>
std::vector<Result> run_indexed(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1) return run_indexed_serial<Result>(n, std::forward<Fn>(fn));
  return run_indexed_parallel<Result>(n, workers, std::forward<Fn>(fn));
}

}  // namespace spuct
