#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "mmwave/errors.hpp"
#include "mmwave/rng.hpp"
#include "mmwave/sim/messages.hpp"

namespace mmwave::sim {

/// Events at the same instant run in phase order, then in insertion order.
enum class Phase : int { scenario = 0, delivery = 1, relay_poll = 2 };

/// Deterministic time-ordered queue keyed by (time, phase, insertion seq).
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    TimeMs time = 0;
    Phase phase = Phase::scenario;
    std::uint64_t seq = 0;
    Payload payload;
  };

  void push(TimeMs time, Phase phase, Payload payload) {
    heap_.push(Entry{time, phase, next_seq_++, std::move(payload)});
  }

  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] const Entry& top() const { return heap_.top(); }

  Entry pop() {
    Entry e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Entry& x, const Entry& y) const {
      if (x.time != y.time) return x.time > y.time;
      if (x.phase != y.phase) return static_cast<int>(x.phase) > static_cast<int>(y.phase);
      return x.seq > y.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Seeded integer latency, uniform in [min_ms, max_ms], with FIFO order per
/// directed link: a message never overtakes an earlier one on the same link.
class LatencyModel {
 public:
  LatencyModel(TimeMs min_ms, TimeMs max_ms, std::uint64_t seed) : min_(min_ms), max_(max_ms), rng_(seed) {
    if (min_ms < 0 || max_ms < min_ms) throw DomainError("latency range must satisfy 0 <= min <= max");
  }

  TimeMs delivery_time(NodeRef from, NodeRef to, TimeMs now) {
    const TimeMs t = now + rng_.uniform_int(min_, max_);
    auto& last = last_[{from, to}];
    last = std::max(last, t);
    return last;
  }

 private:
  TimeMs min_;
  TimeMs max_;
  Rng rng_;
  std::map<std::pair<NodeRef, NodeRef>, TimeMs> last_;
};

}  // namespace mmwave::sim
