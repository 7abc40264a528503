// Cooperative single-threaded executor: one ucontext fiber per rank.

#include <ucontext.h>

#include <exception>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "axisolve/error.hpp"
#include "comm_executors.hpp"
#include "comm_transport.hpp"

namespace axisolve::comm {

namespace {

class SimTransport final : public Transport {
 public:
  SimTransport(int size, CommStats& stats, const std::function<void(Comm&)>& body, std::size_t stack_bytes)
      : size_(size), stats_(stats), body_(body), stack_bytes_(stack_bytes), fibers_(static_cast<std::size_t>(size)) {}

  void run();

  void post(int from, int to, int tag, std::vector<double> payload) override {
    mail_.push(from, to, tag, std::move(payload));
  }

  std::vector<double> take(int at, int from, int tag, bool collective) override {
    Fiber& f = fibers_[static_cast<std::size_t>(at - 1)];
    for (;;) {
      if (aborting_) throw Error(Errc::Aborted, "rank " + std::to_string(at) + " unwound after a failure elsewhere");
      if (mail_.ready(from, at, tag)) return mail_.pop(from, at, tag);
      f.state = State::Blocked;
      f.from = from;
      f.tag = tag;
      f.collective = collective;
      swapcontext(&f.ctx, &scheduler_);
    }
  }

 private:
  enum class State { Runnable, Blocked, Done };

  struct Fiber {
    ucontext_t ctx{};
    std::unique_ptr<char[]> stack;
    State state = State::Runnable;
    int from = 0;
    int tag = 0;
    bool collective = false;
    std::exception_ptr error;
  };

  static void entry();
  [[nodiscard]] Error stall_error() const;

  int size_;
  CommStats& stats_;
  const std::function<void(Comm&)>& body_;
  std::size_t stack_bytes_;
  std::vector<Fiber> fibers_;
  Mailbox mail_;
  ucontext_t scheduler_{};
  std::size_t current_ = 0;
  bool aborting_ = false;
};

thread_local SimTransport* t_active = nullptr;

void SimTransport::entry() {
  SimTransport* self = t_active;
  const std::size_t r = self->current_;
  Fiber& f = self->fibers_[r];
  try {
    Comm comm(*self, self->stats_.ranks[r], static_cast<int>(r) + 1, self->size_);
    self->body_(comm);
  } catch (...) {
    f.error = std::current_exception();
  }
  f.state = State::Done;
}

Error SimTransport::stall_error() const {
  std::ostringstream msg;
  bool missing = false;
  msg << "no rank can progress;";
  for (std::size_t r = 0; r < fibers_.size(); ++r) {
    const Fiber& f = fibers_[r];
    if (f.state != State::Blocked) continue;
    const bool sender_done = fibers_[static_cast<std::size_t>(f.from - 1)].state == State::Done;
    missing = missing || (f.collective && sender_done);
    msg << " rank " << r + 1 << " waits on rank " << f.from << " tag " << f.tag
        << (sender_done ? " (finished)" : "") << ';';
  }
  return Error(missing ? Errc::MissingParticipant : Errc::Deadlock, msg.str());
}

void SimTransport::run() {
  for (auto& f : fibers_) {
    f.stack = std::make_unique<char[]>(stack_bytes_);
    getcontext(&f.ctx);
    f.ctx.uc_stack.ss_sp = f.stack.get();
    f.ctx.uc_stack.ss_size = stack_bytes_;
    f.ctx.uc_link = &scheduler_;
    makecontext(&f.ctx, &SimTransport::entry, 0);
  }
  std::exception_ptr first_error;
  for (;;) {
    bool alive = false;
    bool progressed = false;
    for (std::size_t r = 0; r < fibers_.size(); ++r) {
      Fiber& f = fibers_[r];
      if (f.state == State::Done) continue;
      alive = true;
      if (f.state == State::Blocked && !aborting_ && !mail_.ready(f.from, static_cast<int>(r) + 1, f.tag)) continue;
      current_ = r;
      f.state = State::Runnable;
      swapcontext(&scheduler_, &f.ctx);
      progressed = true;
      if (f.error && !first_error) {
        first_error = f.error;
        aborting_ = true;
      }
    }
    if (!alive) break;
    if (!progressed) {
      first_error = std::make_exception_ptr(stall_error());
      aborting_ = true;
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void run_simulated(int size, CommStats& stats, const std::function<void(Comm&)>& body, const ExecutorOptions& options) {
  if (t_active != nullptr) throw Error(Errc::DomainError, "nested simulator runs are not supported");
  SimTransport sim(size, stats, body, options.fiber_stack_bytes);
  t_active = &sim;
  try {
    sim.run();
  } catch (...) {
    t_active = nullptr;
    throw;
  }
  t_active = nullptr;
}

}  // namespace axisolve::comm
