#ifndef SOCRATIC_PARALLEL_H_
#define SOCRATIC_PARALLEL_H_

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace socratic {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Callers write each
// result into a slot owned by i, so output is independent of scheduling.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  const int threads = std::min(jobs, count);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace socratic

#endif  // SOCRATIC_PARALLEL_H_
