#pragma once

#include <barrier>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tslb {

/// Deterministic work partition: contiguous chunk `part` of `parts` over
/// [0, total). The split depends only on (total, parts), never on timing.
struct Range {
  std::size_t begin = 0, end = 0;
  std::size_t size() const { return end - begin; }
};

inline Range partition_range(std::size_t total, int parts, int part) {
  const std::size_t p = std::size_t(parts);
  return {total * std::size_t(part) / p, total * (std::size_t(part) + 1) / p};
}

inline int default_worker_count() {
  if (const char* env = std::getenv("TSLB_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

/// Persistent thread team. run(fn) executes fn(worker_id) on every worker and
/// returns when all are done; the calling thread only coordinates. Kernels
/// are written so that each phase's writes are disjoint across workers, so
/// results are bit-identical for any worker count.
class WorkerPool {
 public:
  explicit WorkerPool(int workers = default_worker_count())
      : nw_(workers < 1 ? 1 : workers),
        start_(nw_ + 1),
        done_(nw_ + 1) {
    threads_.reserve(std::size_t(nw_));
    for (int w = 0; w < nw_; ++w)
      threads_.emplace_back([this, w] { worker_loop(w); });
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    stop_ = true;
    start_.arrive_and_wait();
    for (auto& t : threads_) t.join();
  }

  int size() const { return nw_; }

  void run(const std::function<void(int)>& fn) {
    job_ = &fn;
    error_ = nullptr;
    start_.arrive_and_wait();
    done_.arrive_and_wait();
    job_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void worker_loop(int id) {
    for (;;) {
      start_.arrive_and_wait();
      if (stop_) return;
      try {
        (*job_)(id);
      } catch (...) {
        std::scoped_lock lock(error_mutex_);
        if (!error_) error_ = std::current_exception();
      }
      done_.arrive_and_wait();
    }
  }

  int nw_;
  std::barrier<> start_;
  std::barrier<> done_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* job_ = nullptr;
  bool stop_ = false;
  std::exception_ptr error_;
  std::mutex error_mutex_;
};

}  // namespace tslb
