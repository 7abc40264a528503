#include <condition_variable>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "axisolve/error.hpp"
#include "comm_executors.hpp"
#include "comm_transport.hpp"

namespace axisolve::comm {

namespace {

class ThreadTransport final : public Transport {
 public:
  explicit ThreadTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  void post(int from, int to, int tag, std::vector<double> payload) override {
    {
      std::lock_guard lock(mutex_);
      mail_.push(from, to, tag, std::move(payload));
    }
    cv_.notify_all();
  }

  std::vector<double> take(int at, int from, int tag, bool /*collective*/) override {
    std::unique_lock lock(mutex_);
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
      if (aborting_) throw Error(Errc::Aborted, "rank " + std::to_string(at) + " unwound after a failure elsewhere");
      if (mail_.ready(from, at, tag)) return mail_.pop(from, at, tag);
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && !mail_.ready(from, at, tag) && !aborting_) {
        aborting_ = true;
        cv_.notify_all();
        throw Error(Errc::Deadlock, "rank " + std::to_string(at) + " timed out waiting on rank " +
                                        std::to_string(from) + " tag " + std::to_string(tag));
      }
    }
  }

  void abort() {
    {
      std::lock_guard lock(mutex_);
      aborting_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  std::condition_variable cv_;
  Mailbox mail_;
  bool aborting_ = false;
};

}  // namespace

void run_threaded(int size, CommStats& stats, const std::function<void(Comm&)>& body, const ExecutorOptions& options) {
  ThreadTransport transport(options.recv_timeout);
  std::mutex error_mutex;
  std::exception_ptr first_error;
  bool first_is_abort = false;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(size));
  for (int r = 1; r <= size; ++r) {
    workers.emplace_back([&, r] {
      try {
        Comm comm(transport, stats.ranks[static_cast<std::size_t>(r - 1)], r, size);
        body(comm);
      } catch (const Error& e) {
        // Aborted only reports the unwinding of a bystander; keep the root cause.
        const bool is_abort = e.code() == Errc::Aborted;
        {
          std::lock_guard lock(error_mutex);
          if (!first_error || (first_is_abort && !is_abort)) {
            first_error = std::current_exception();
            first_is_abort = is_abort;
          }
        }
        transport.abort();
      } catch (...) {
        {
          std::lock_guard lock(error_mutex);
          if (!first_error || first_is_abort) {
            first_error = std::current_exception();
            first_is_abort = false;
          }
        }
        transport.abort();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace axisolve::comm
