#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pullin {

/// Worker cap for batch solves: PULLIN_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
std::size_t thread_cap();

/// Runs body(i) for i in [0, count) on up to thread_cap() threads. The first
/// exception thrown by any body is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  const std::size_t workers = std::min(count, thread_cap());
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(run);
  run();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pullin
