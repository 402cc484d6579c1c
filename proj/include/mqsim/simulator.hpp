#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqsim/behavior.hpp"
#include "mqsim/run.hpp"
#include "mqsim/schedule.hpp"

namespace mqsim {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One undelivered trigger: a message in flight, an armed timer, or a
// scheduled invocation.
struct PendingEvent {
  enum class Kind { receive = 0, timer_expire = 1, invoke = 2 };

  Time real_time;
  ProcessId process = 0;  // where it triggers
  Kind kind = Kind::invoke;
  long long primary = 0;    // receive: sender; timer: arm order; invoke: schedule position
  long long secondary = 0;  // receive: sequence

  ProcessId sender = -1;  // receive only
  long long sequence = -1;
  std::string payload;  // receive and timer
  OpKind op = OpKind::enqueue;
  std::optional<Value> arg;
};

// Total order on pending events. Triggers at one instant resolve by process,
// then receives before timer expirations before invocations, then by the
// per-kind counters. This is the sole source of tie-breaking, so equal
// schedules always replay to identical runs.
inline bool event_precedes(const PendingEvent& a, const PendingEvent& b) {
  if (a.real_time != b.real_time) return a.real_time < b.real_time;
  if (a.process != b.process) return a.process < b.process;
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  if (a.primary != b.primary) return a.primary < b.primary;
  return a.secondary < b.secondary;
}

struct SimOutcome {
  Run run;
  std::vector<Time> quiescence_times;  // instants with no message or timer outstanding
  std::vector<std::unique_ptr<ProcessState>> final_states;
};

inline SimOutcome simulate(const ProcessBehavior& behavior, const Schedule& schedule,
                           long long event_cap = 1'000'000) {
  schedule.validate();
  const int n = schedule.params.n;

  SimOutcome out;
  out.run.params = schedule.params;
  out.run.clock_offsets = schedule.clock_offsets;
  out.run.events.resize(static_cast<size_t>(n));

  std::vector<std::unique_ptr<ProcessState>> states;
  states.reserve(static_cast<size_t>(n));
  for (ProcessId p = 0; p < n; ++p) states.push_back(behavior.initial_state(p, schedule.params));

  struct EventOrder {
    bool operator()(const PendingEvent& a, const PendingEvent& b) const { return event_precedes(a, b); }
  };
  std::multiset<PendingEvent, EventOrder> pending;
  long long active = 0;  // pending receives and timers

  for (size_t i = 0; i < schedule.invocations.size(); ++i) {
    const auto& inv = schedule.invocations[i];
    PendingEvent e;
    e.real_time = inv.time;
    e.process = inv.process;
    e.kind = PendingEvent::Kind::invoke;
    e.primary = static_cast<long long>(i);
    e.op = inv.op;
    e.arg = inv.argument;
    pending.insert(std::move(e));
  }

  std::vector<long long> send_seq(static_cast<size_t>(n), 0), timer_seq(static_cast<size_t>(n), 0);
  std::vector<std::optional<OpKind>> open_op(static_cast<size_t>(n));

  auto local = [&](ProcessId p, const Time& t) { return t + schedule.clock_offsets[static_cast<size_t>(p)]; };
  auto record = [&](ProcessId p, const Time& t, EventKind kind) {
    out.run.events[static_cast<size_t>(p)].push_back(EventRecord{p, t, local(p, t), std::move(kind)});
  };

  auto send_one = [&](ProcessId from, ProcessId to, const Time& t, const std::string& payload) {
    if (to == from) throw SimulationError("send to self");
    if (to < 0 || to >= n) throw SimulationError("send to unknown process");
    const long long seq = send_seq[static_cast<size_t>(from)]++;
    const Time delay = schedule.delay_policy.delay_for(from, to, t);
    record(from, t, SendEvent{to, seq, payload});
    out.run.messages.push_back(MessageRecord{from, to, t, t + delay, payload, seq});
    PendingEvent e;
    e.real_time = t + delay;
    e.process = to;
    e.kind = PendingEvent::Kind::receive;
    e.primary = from;
    e.secondary = seq;
    e.sender = from;
    e.sequence = seq;
    e.payload = payload;
    pending.insert(std::move(e));
    ++active;
  };

  auto apply = [&](ProcessId p, const Time& t, const Action& action) {
    if (const auto* send = std::get_if<SendAction>(&action)) {
      if (send->to) {
        send_one(p, *send->to, t, send->payload);
      } else {
        for (ProcessId q = 0; q < n; ++q)
          if (q != p) send_one(p, q, t, send->payload);
      }
    } else if (const auto* timer = std::get_if<SetTimerAction>(&action)) {
      if (timer->duration < Time(0)) throw SimulationError("negative timer duration");
      const long long order = timer_seq[static_cast<size_t>(p)]++;
      record(p, t, TimerSetEvent{timer->duration, timer->payload});
      PendingEvent e;
      e.real_time = t + timer->duration;  // clocks drift only by constant offsets
      e.process = p;
      e.kind = PendingEvent::Kind::timer_expire;
      e.primary = order;
      e.payload = timer->payload;
      pending.insert(std::move(e));
      ++active;
    } else {
      const auto& resp = std::get<RespondAction>(action);
      auto& open = open_op[static_cast<size_t>(p)];
      if (!open || *open != resp.op)
        throw SimulationError("respond without matching pending operation at process " + std::to_string(p));
      record(p, t, RespondEvent{resp.op, resp.value});
      open.reset();
    }
  };

  long long handled = 0;
  while (!pending.empty()) {
    const PendingEvent e = *pending.begin();
    pending.erase(pending.begin());
    if (++handled > event_cap) throw SimulationError("non-quiescence: event cap exceeded");

    const Time& t = e.real_time;
    const ProcessId p = e.process;
    std::vector<Action> actions;
    switch (e.kind) {
      case PendingEvent::Kind::invoke:
        if (open_op[static_cast<size_t>(p)])
          throw SimulationError("overlapping invocation at process " + std::to_string(p));
        open_op[static_cast<size_t>(p)] = e.op;
        record(p, t, InvokeEvent{e.op, e.arg});
        actions = behavior.on_invoke(*states[static_cast<size_t>(p)], e.op, e.arg, local(p, t));
        break;
      case PendingEvent::Kind::receive:
        --active;
        record(p, t, ReceiveEvent{e.sender, e.sequence, e.payload});
        actions = behavior.on_receive(*states[static_cast<size_t>(p)], e.sender, e.payload, local(p, t));
        break;
      case PendingEvent::Kind::timer_expire:
        --active;
        record(p, t, TimerExpireEvent{e.payload});
        actions = behavior.on_timer_expire(*states[static_cast<size_t>(p)], e.payload, local(p, t));
        break;
    }
    for (const auto& a : actions) apply(p, t, a);

    if (active == 0 && (out.quiescence_times.empty() || out.quiescence_times.back() != t))
      out.quiescence_times.push_back(t);
  }

  for (ProcessId p = 0; p < n; ++p)
    if (open_op[static_cast<size_t>(p)])
      throw SimulationError("operation never responded at process " + std::to_string(p));

  if (out.quiescence_times.empty()) out.quiescence_times.push_back(Time(0));
  canonicalize_messages(out.run.messages);
  validate_run(out.run);
  out.final_states = std::move(states);
  return out;
}

}  // namespace mqsim
