#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pit {

/// Fixed-size pool running index-parallel loops. Each index is handled by
/// exactly one worker and writes only its own output slot, so results do
/// not depend on the worker count or scheduling.
class WorkerPool {
 public:
  /// `workers` <= 1 runs every loop inline on the calling thread.
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t workers() const noexcept { return threads_.empty() ? 1 : threads_.size(); }

  /// Runs body(i) for i in [0, n) and waits. Rethrows the exception of the
  /// lowest failing index.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

 private:
  void worker_loop();

  std::vector<std::jthread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace pit
