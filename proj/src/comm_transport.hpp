#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <tuple>
#include <vector>

namespace axisolve::comm {

/// Point-to-point delivery underneath Comm. Collectives are composed from these two
/// calls in shared code, so both executors see identical message sequences.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual void post(int from, int to, int tag, std::vector<double> payload) = 0;
  /// Blocks rank `at` until a message from (from, tag) is available.
  /// `collective` marks waits issued inside a reduce/broadcast.
  virtual std::vector<double> take(int at, int from, int tag, bool collective) = 0;
};

/// FIFO queues keyed by (from, to, tag). Not synchronized.
class Mailbox {
 public:
  void push(int from, int to, int tag, std::vector<double> payload) {
    queues_[{from, to, tag}].push_back(std::move(payload));
  }

  [[nodiscard]] bool ready(int from, int to, int tag) const {
    const auto it = queues_.find({from, to, tag});
    return it != queues_.end() && !it->second.empty();
  }

  std::vector<double> pop(int from, int to, int tag) {
    auto it = queues_.find({from, to, tag});
    auto payload = std::move(it->second.front());
    it->second.pop_front();
    if (it->second.empty()) queues_.erase(it);
    return payload;
  }

  [[nodiscard]] std::size_t pending() const noexcept { return queues_.size(); }

 private:
  std::map<std::tuple<int, int, int>, std::deque<std::vector<double>>> queues_;
};

}  // namespace axisolve::comm
