#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mqsim/behavior.hpp"
#include "mqsim/params.hpp"

namespace mqsim {
namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline Time parse_time_field(const std::string& s) {
  auto t = Time::parse(s);
  if (!t) throw std::runtime_error("malformed payload field: " + s);
  return *t;
}

}  // namespace detail

// Multiplicity queue for exactly synchronized clocks. Every operation
// broadcasts a timestamped record and answers d/2 after invocation, so a
// process hears about a remote instance before answering its own exactly when
// the remote one responded before the local invocation. Dequeue timestamps
// within d/2 of a batch leader form one batch that consumes a single element;
// the element is charged to the first batch member whose visible queue is
// non-empty, which keeps late-starting members that already see an in-flight
// enqueue consistent with everyone else. Returns are recomputed from the
// record sets instead of mutating a live queue, so the replay at every
// process agrees on which elements are gone.
class ZeroUQueueBehavior final : public ProcessBehavior {
  struct EnqueueRecord {
    Time clock;
    ProcessId pid;
    Value arg;
    bool operator<(const EnqueueRecord& o) const {
      if (clock != o.clock) return clock < o.clock;
      return pid < o.pid;
    }
  };

  struct State final : ProcessState {
    ProcessId self = 0;
    Time half_d;
    std::set<EnqueueRecord> enqueues;
    std::set<std::pair<Time, ProcessId>> dequeue_stamps;
  };

  // Return value for this process' dequeue stamped at `clock`. Enqueues are
  // visible to a reader stamped c once their clock is at most c - d/2, when
  // the broadcast has reached everyone who answers that late.
  static std::optional<Value> replay_return(const State& st, const Time& clock) {
    struct Slot {
      Time stamp;
      Value arg;
      bool consumed = false;
    };
    std::vector<Slot> line;
    line.reserve(st.enqueues.size());
    for (const auto& rec : st.enqueues) line.push_back({rec.clock, rec.arg});
    auto first_visible = [&](const Time& limit) -> Slot* {
      for (auto& slot : line)
        if (!slot.consumed && slot.stamp <= limit) return &slot;
      return nullptr;
    };

    auto it = st.dequeue_stamps.begin();
    while (it != st.dequeue_stamps.end()) {
      const Time leader = it->first;
      bool mine = false;
      std::vector<Time> member_clocks;
      for (; it != st.dequeue_stamps.end() && !(it->first > leader + st.half_d); ++it) {
        member_clocks.push_back(it->first);
        if (it->first == clock && it->second == st.self) mine = true;
      }
      if (mine) {
        if (const Slot* slot = first_visible(clock - st.half_d)) return slot->arg;
        return std::nullopt;
      }
      for (const Time& member : member_clocks)
        if (Slot* slot = first_visible(member - st.half_d)) {
          slot->consumed = true;
          break;
        }
    }
    return std::nullopt;
  }

 public:
  std::string name() const override { return "zero-u"; }

  std::unique_ptr<ProcessState> initial_state(ProcessId self, const SystemParams& params) const override {
    auto st = std::make_unique<State>();
    st->self = self;
    st->half_d = params.d / Time(2);
    return st;
  }

  std::vector<Action> on_invoke(ProcessState& state, OpKind op, const std::optional<Value>& arg,
                                const Time& local_time) const override {
    auto& st = static_cast<State&>(state);
    const std::string self_field = std::to_string(st.self);
    if (op == OpKind::enqueue) {
      st.enqueues.insert({local_time, st.self, *arg});
      return {SendAction{std::nullopt,
                         "enq|" + local_time.str() + "|" + self_field + "|" + std::to_string(*arg)},
              SetTimerAction{st.half_d, "enq-done|" + std::to_string(*arg)}};
    }
    st.dequeue_stamps.insert({local_time, st.self});
    return {SendAction{std::nullopt, "deq|" + local_time.str() + "|" + self_field},
            SetTimerAction{st.half_d, "deq-done|" + local_time.str()}};
  }

  std::vector<Action> on_receive(ProcessState& state, ProcessId, const std::string& payload,
                                 const Time&) const override {
    auto& st = static_cast<State&>(state);
    auto parts = detail::split(payload, '|');
    const Time clock = detail::parse_time_field(parts[1]);
    const auto pid = static_cast<ProcessId>(std::stoi(parts[2]));
    if (parts[0] == "enq")
      st.enqueues.insert({clock, pid, std::stoll(parts[3])});
    else
      st.dequeue_stamps.insert({clock, pid});
    return {};
  }

  std::vector<Action> on_timer_expire(ProcessState& state, const std::string& payload,
                                      const Time&) const override {
    auto& st = static_cast<State&>(state);
    auto parts = detail::split(payload, '|');
    if (parts[0] == "enq-done") return {RespondAction{OpKind::enqueue, std::nullopt}};
    return {RespondAction{OpKind::dequeue, replay_return(st, detail::parse_time_field(parts[1]))}};
  }
};

// Full-information queue: every operation broadcasts a timestamped record and
// answers after a fixed wait by replaying all records known by then in
// timestamp order. With the wait at d + epsilon every process has seen every
// earlier-timestamped record before answering, so replays agree.
class FullInfoQueueBehavior final : public ProcessBehavior {
  struct Record {
    Time clock;
    ProcessId pid;
    OpKind kind;
    std::optional<Value> arg;
    bool operator<(const Record& o) const {
      if (clock != o.clock) return clock < o.clock;
      return pid < o.pid;
    }
  };

  struct State final : ProcessState {
    ProcessId self = 0;
    Time wait;
    std::set<Record> records;
  };

 public:
  // A positive wait below d + epsilon gives the fast but incorrect variant.
  explicit FullInfoQueueBehavior(std::optional<Time> wait = std::nullopt) : wait_(std::move(wait)) {
    if (wait_ && !(*wait_ > Time(0)))
      throw std::invalid_argument("full-information queue: wait must be positive");
  }

  std::string name() const override { return wait_ ? "strawman:" + wait_->str() : "baseline"; }

  std::unique_ptr<ProcessState> initial_state(ProcessId self, const SystemParams& params) const override {
    auto st = std::make_unique<State>();
    st->self = self;
    st->wait = wait_ ? *wait_ : params.d + epsilon(params);
    return st;
  }

  std::vector<Action> on_invoke(ProcessState& state, OpKind op, const std::optional<Value>& arg,
                                const Time& local_time) const override {
    auto& st = static_cast<State&>(state);
    Record rec{local_time, st.self, op, arg};
    st.records.insert(rec);
    const std::string kind = op == OpKind::enqueue ? "E" : "D";
    const std::string arg_field = arg ? std::to_string(*arg) : "-";
    return {SendAction{std::nullopt,
                       "rec|" + kind + "|" + local_time.str() + "|" + std::to_string(st.self) + "|" + arg_field},
            SetTimerAction{st.wait, "reply|" + local_time.str()}};
  }

  std::vector<Action> on_receive(ProcessState& state, ProcessId, const std::string& payload,
                                 const Time&) const override {
    auto& st = static_cast<State&>(state);
    auto parts = detail::split(payload, '|');
    Record rec;
    rec.kind = parts[1] == "E" ? OpKind::enqueue : OpKind::dequeue;
    rec.clock = detail::parse_time_field(parts[2]);
    rec.pid = static_cast<ProcessId>(std::stoi(parts[3]));
    if (parts[4] != "-") rec.arg = std::stoll(parts[4]);
    st.records.insert(rec);
    return {};
  }

  std::vector<Action> on_timer_expire(ProcessState& state, const std::string& payload,
                                      const Time&) const override {
    auto& st = static_cast<State&>(state);
    auto parts = detail::split(payload, '|');
    const Time clock = detail::parse_time_field(parts[1]);
    OpKind kind = OpKind::enqueue;
    std::optional<Value> result;
    std::deque<Value> queue;
    for (const auto& rec : st.records) {
      if (rec.kind == OpKind::enqueue) {
        queue.push_back(*rec.arg);
        if (rec.clock == clock && rec.pid == st.self) kind = OpKind::enqueue;
      } else {
        std::optional<Value> popped;
        if (!queue.empty()) {
          popped = queue.front();
          queue.pop_front();
        }
        if (rec.clock == clock && rec.pid == st.self) {
          kind = OpKind::dequeue;
          result = popped;
        }
      }
    }
    return {RespondAction{kind, kind == OpKind::dequeue ? result : std::nullopt}};
  }

 private:
  std::optional<Time> wait_;
};

inline std::unique_ptr<ProcessBehavior> zero_u_multiplicity_queue() {
  return std::make_unique<ZeroUQueueBehavior>();
}
inline std::unique_ptr<ProcessBehavior> full_info_fifo_baseline() {
  return std::make_unique<FullInfoQueueBehavior>();
}
inline std::unique_ptr<ProcessBehavior> strawman_fast(Time wait) {
  return std::make_unique<FullInfoQueueBehavior>(std::move(wait));
}

// "zero-u", "baseline", or "strawman:<wait>" with the wait as "p" or "p/q".
inline std::unique_ptr<ProcessBehavior> behavior_by_name(const std::string& name) {
  if (name == "zero-u") return zero_u_multiplicity_queue();
  if (name == "baseline") return full_info_fifo_baseline();
  if (name.rfind("strawman:", 0) == 0) {
    auto wait = Time::parse(name.substr(9));
    if (!wait) throw std::invalid_argument("unparseable strawman wait: " + name.substr(9));
    return strawman_fast(*wait);
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

}  // namespace mqsim
