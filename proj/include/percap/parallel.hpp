#pragma once

// Replica-parallel map-reduce. Work splits into contiguous replica ranges,
// one per worker; partial tallies merge in worker order. Tallies are integer
// counts, so totals are identical for every worker count.

#include <cstdint>
#include <thread>
#include <vector>

namespace percap {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Partial: default-constructible, with merge(const Partial&).
// Fn: void(uint64_t replica_index, Partial&).
template <class Partial, class Fn>
Partial for_each_replica(uint64_t replica_begin, uint64_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n < 2 * uint64_t(workers)) {
    Partial acc;
    for (uint64_t i = 0; i < n; ++i) fn(replica_begin + i, acc);
    return acc;
  }
  std::vector<Partial> parts(static_cast<size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<std::thread> threads;
  threads.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) {
    const uint64_t lo = replica_begin + n * uint64_t(w) / uint64_t(workers);
    const uint64_t hi = replica_begin + n * uint64_t(w + 1) / uint64_t(workers);
    threads.emplace_back([&, lo, hi, w]() {
      try {
        Partial& acc = parts[size_t(w)];
        for (uint64_t i = lo; i < hi; ++i) fn(i, acc);
      } catch (...) {
        errors[size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Partial acc;
  for (int w = 0; w < workers; ++w) acc.merge(parts[size_t(w)]);
  return acc;
}

}  // namespace percap
