#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqsim/events.hpp"
#include "mqsim/params.hpp"

namespace mqsim {

// One delay rule. Empty sender/receiver match any process; the time window is
// [from_time, before_time) with either end open-ended when absent.
struct DelayRule {
  std::optional<ProcessId> sender;
  std::optional<ProcessId> receiver;
  std::optional<Time> from_time;    // matches send_time >= from_time
  std::optional<Time> before_time;  // matches send_time < before_time
  Time delay;

  bool matches(ProcessId s, ProcessId r, const Time& send_time) const {
    if (sender && *sender != s) return false;
    if (receiver && *receiver != r) return false;
    if (from_time && send_time < *from_time) return false;
    if (before_time && !(send_time < *before_time)) return false;
    return true;
  }

  friend bool operator==(const DelayRule&, const DelayRule&) = default;
};

// First matching rule wins; default_delay keeps the policy total.
struct DelayPolicy {
  std::vector<DelayRule> rules;
  Time default_delay = Time(1);

  static DelayPolicy uniform(Time d) { return DelayPolicy{{}, std::move(d)}; }

  Time delay_for(ProcessId s, ProcessId r, const Time& send_time) const {
    for (const auto& rule : rules)
      if (rule.matches(s, r, send_time)) return rule.delay;
    return default_delay;
  }

  void validate() const {
    for (const auto& rule : rules)
      if (rule.delay < Time(0)) throw std::invalid_argument("DelayPolicy: negative delay");
    if (default_delay < Time(0)) throw std::invalid_argument("DelayPolicy: negative default delay");
  }

  friend bool operator==(const DelayPolicy&, const DelayPolicy&) = default;
};

struct Invocation {
  ProcessId process;
  Time time;
  OpKind op;
  std::optional<Value> argument;  // required for enqueue, absent for dequeue
  friend bool operator==(const Invocation&, const Invocation&) = default;
};

struct Schedule {
  SystemParams params;
  std::vector<Invocation> invocations;
  std::vector<Time> clock_offsets;  // one per process
  DelayPolicy delay_policy;

  void validate() const {
    params.validate();
    if (static_cast<int>(clock_offsets.size()) != params.n)
      throw std::invalid_argument("Schedule: clock_offsets size must equal n");
    delay_policy.validate();
    std::set<Value> enqueue_args;
    for (const auto& inv : invocations) {
      if (inv.process < 0 || inv.process >= params.n)
        throw std::invalid_argument("Schedule: invocation process out of range");
      if (inv.op == OpKind::enqueue) {
        if (!inv.argument) throw std::invalid_argument("Schedule: enqueue without argument");
        if (!enqueue_args.insert(*inv.argument).second)
          throw std::invalid_argument("Schedule: duplicate enqueue argument");
      } else if (inv.argument) {
        throw std::invalid_argument("Schedule: dequeue takes no argument");
      }
    }
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

}  // namespace mqsim
