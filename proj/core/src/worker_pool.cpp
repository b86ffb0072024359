#include "pit/worker_pool.hpp"

namespace pit {

WorkerPool::WorkerPool(std::size_t workers) {
  if (workers <= 1) return;
  threads_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  // jthread joins on destruction.
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::unique_lock lock(mutex_);
  body_ = &body;
  next_ = 0;
  count_ = n;
  finished_ = 0;
  errors_.assign(n, nullptr);
  ++generation_;
  wake_.notify_all();
  done_.wait(lock, [&] { return finished_ == count_; });
  body_ = nullptr;
  for (auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

void WorkerPool::worker_loop() {
  std::size_t seen = 0;
  std::unique_lock lock(mutex_);
  for (;;) {
    wake_.wait(lock, [&] { return stop_ || (generation_ != seen && next_ < count_); });
    if (stop_) return;
    while (body_ && next_ < count_) {
      const std::size_t i = next_++;
      const auto* body = body_;
      lock.unlock();
      try {
        (*body)(i);
      } catch (...) {
        errors_[i] = std::current_exception();
      }
      lock.lock();
      if (++finished_ == count_) done_.notify_all();
    }
    seen = generation_;
  }
}

}  // namespace pit
