#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mqsim/events.hpp"
#include "mqsim/params.hpp"

namespace mqsim {

// A complete execution: per-process event sequences plus the message log.
// Messages are kept in canonical (sender, sequence) order.
struct Run {
  SystemParams params;
  std::vector<std::vector<EventRecord>> events;  // indexed by process id
  std::vector<Time> clock_offsets;
  std::vector<MessageRecord> messages;

  friend bool operator==(const Run&, const Run&) = default;
};

inline void canonicalize_messages(std::vector<MessageRecord>& messages) {
  std::sort(messages.begin(), messages.end(), [](const MessageRecord& a, const MessageRecord& b) {
    if (a.sender != b.sender) return a.sender < b.sender;
    return a.sequence < b.sequence;
  });
}

// Structural sanity of a run object: shapes, clock consistency, event order,
// and agreement between the message log and the send/receive events.
inline void validate_run(const Run& run) {
  run.params.validate();
  const int n = run.params.n;
  if (static_cast<int>(run.events.size()) != n) throw std::invalid_argument("run: events size must equal n");
  if (static_cast<int>(run.clock_offsets.size()) != n)
    throw std::invalid_argument("run: clock_offsets size must equal n");

  std::map<std::pair<ProcessId, long long>, const EventRecord*> sends, receives;
  for (ProcessId p = 0; p < n; ++p) {
    const Time* prev = nullptr;
    bool pending_op = false;
    for (const auto& ev : run.events[p]) {
      if (ev.process != p) throw std::invalid_argument("run: event filed under the wrong process");
      if (ev.local_time != ev.real_time + run.clock_offsets[p])
        throw std::invalid_argument("run: local time inconsistent with clock offset");
      if (prev && ev.real_time < *prev) throw std::invalid_argument("run: events out of order");
      prev = &ev.real_time;
      if (const auto* inv = std::get_if<InvokeEvent>(&ev.kind)) {
        if (pending_op) throw std::invalid_argument("run: invoke while an operation is pending");
        if ((inv->op == OpKind::enqueue) != inv->arg.has_value())
          throw std::invalid_argument("run: invoke argument mismatch");
        pending_op = true;
      } else if (std::holds_alternative<RespondEvent>(ev.kind)) {
        if (!pending_op) throw std::invalid_argument("run: respond without a pending operation");
        pending_op = false;
      } else if (const auto* s = std::get_if<SendEvent>(&ev.kind)) {
        if (!sends.emplace(std::make_pair(p, s->sequence), &ev).second)
          throw std::invalid_argument("run: duplicate send sequence");
      } else if (const auto* r = std::get_if<ReceiveEvent>(&ev.kind)) {
        if (!receives.emplace(std::make_pair(r->sender, r->sequence), &ev).second)
          throw std::invalid_argument("run: duplicate receive sequence");
      }
    }
  }

  if (run.messages.size() != sends.size() || run.messages.size() != receives.size())
    throw std::invalid_argument("run: message log does not match send/receive events");
  for (const auto& m : run.messages) {
    if (m.receive_time < m.send_time) throw std::invalid_argument("run: message received before it was sent");
    auto s = sends.find({m.sender, m.sequence});
    auto r = receives.find({m.sender, m.sequence});
    if (s == sends.end() || r == receives.end())
      throw std::invalid_argument("run: message without matching events");
    const auto& se = std::get<SendEvent>(s->second->kind);
    const auto& re = std::get<ReceiveEvent>(r->second->kind);
    if (se.receiver != m.receiver || r->second->process != m.receiver || se.payload != m.payload ||
        re.payload != m.payload || s->second->real_time != m.send_time || r->second->real_time != m.receive_time)
      throw std::invalid_argument("run: message log disagrees with events");
  }
}

struct OperationInstance {
  ProcessId process;
  OpKind kind;
  std::optional<Value> argument;      // enqueue only
  std::optional<Value> return_value;  // dequeue only; nullopt is the empty return
  Time invoke_time;
  Time response_time;
  int instance_id;
  friend bool operator==(const OperationInstance&, const OperationInstance&) = default;
};

struct History {
  SystemParams params;
  std::vector<OperationInstance> instances;  // ordered by (invoke_time, process)
  friend bool operator==(const History&, const History&) = default;
};

// a finished strictly before b began
inline bool strictly_precedes(const OperationInstance& a, const OperationInstance& b) {
  return a.response_time < b.invoke_time;
}

inline void validate_history(const History& h) {
  h.params.validate();
  std::set<Value> args;
  std::map<ProcessId, std::vector<const OperationInstance*>> per_process;
  for (const auto& ins : h.instances) {
    if (ins.process < 0 || ins.process >= h.params.n)
      throw std::invalid_argument("history: process out of range");
    if (ins.response_time < ins.invoke_time) throw std::invalid_argument("history: response before invoke");
    if (ins.kind == OpKind::enqueue) {
      if (!ins.argument) throw std::invalid_argument("history: enqueue without argument");
      if (!args.insert(*ins.argument).second)
        throw std::invalid_argument("history: duplicate enqueue argument");
    } else if (ins.argument) {
      throw std::invalid_argument("history: dequeue takes no argument");
    }
    per_process[ins.process].push_back(&ins);
  }
  for (auto& [p, ops] : per_process) {
    std::sort(ops.begin(), ops.end(), [](const OperationInstance* a, const OperationInstance* b) {
      return a->invoke_time < b->invoke_time;
    });
    for (size_t i = 1; i < ops.size(); ++i)
      if (ops[i]->invoke_time < ops[i - 1]->response_time)
        throw std::invalid_argument("history: overlapping operations at one process");
  }
}

// Pairs invoke/respond events into operation instances. Ids are assigned in
// (invoke_time, process) order.
inline History extract_history(const Run& run) {
  History h;
  h.params = run.params;
  for (ProcessId p = 0; p < run.params.n; ++p) {
    std::optional<OperationInstance> open;
    for (const auto& ev : run.events[p]) {
      if (const auto* inv = std::get_if<InvokeEvent>(&ev.kind)) {
        if (open) throw std::runtime_error("incomplete operation: invoke while another is open");
        OperationInstance ins;
        ins.process = p;
        ins.kind = inv->op;
        ins.argument = inv->arg;
        ins.invoke_time = ev.real_time;
        ins.instance_id = -1;
        open = std::move(ins);
      } else if (const auto* resp = std::get_if<RespondEvent>(&ev.kind)) {
        if (!open || open->kind != resp->op)
          throw std::runtime_error("incomplete operation: respond does not match an open invoke");
        open->response_time = ev.real_time;
        if (open->kind == OpKind::dequeue) open->return_value = resp->value;
        h.instances.push_back(*open);
        open.reset();
      }
    }
    if (open)
      throw std::runtime_error("incomplete operation: " + std::string(op_name(open->kind)) + " at process " +
                               std::to_string(p) + " never responded");
  }
  std::sort(h.instances.begin(), h.instances.end(), [](const OperationInstance& a, const OperationInstance& b) {
    if (a.invoke_time != b.invoke_time) return a.invoke_time < b.invoke_time;
    return a.process < b.process;
  });
  for (size_t i = 0; i < h.instances.size(); ++i) h.instances[i].instance_id = static_cast<int>(i);
  return h;
}

// --- local views ---------------------------------------------------------
// What a process can observe: its own invocations, message receipts, and
// timer expirations, stamped with its local clock.

struct ViewInvoke {
  OpKind op;
  std::optional<Value> arg;
  friend bool operator==(const ViewInvoke&, const ViewInvoke&) = default;
};
struct ViewReceive {
  ProcessId sender;
  long long sequence;
  std::string payload;
  friend bool operator==(const ViewReceive&, const ViewReceive&) = default;
};
struct ViewTimer {
  std::string payload;
  friend bool operator==(const ViewTimer&, const ViewTimer&) = default;
};

struct ViewEvent {
  Time local_time;
  std::variant<ViewInvoke, ViewReceive, ViewTimer> input;
  friend bool operator==(const ViewEvent&, const ViewEvent&) = default;
};

inline std::vector<ViewEvent> local_view_full(const Run& run, ProcessId p) {
  if (p < 0 || p >= run.params.n) throw std::invalid_argument("local_view: process out of range");
  std::vector<ViewEvent> view;
  for (const auto& ev : run.events[p]) {
    if (const auto* inv = std::get_if<InvokeEvent>(&ev.kind))
      view.push_back({ev.local_time, ViewInvoke{inv->op, inv->arg}});
    else if (const auto* r = std::get_if<ReceiveEvent>(&ev.kind))
      view.push_back({ev.local_time, ViewReceive{r->sender, r->sequence, r->payload}});
    else if (const auto* t = std::get_if<TimerExpireEvent>(&ev.kind))
      view.push_back({ev.local_time, ViewTimer{t->payload}});
  }
  return view;
}

// Input events of p with local time <= until_local.
inline std::vector<ViewEvent> local_view(const Run& run, ProcessId p, const Time& until_local) {
  auto view = local_view_full(run, p);
  auto cut = std::find_if(view.begin(), view.end(),
                          [&](const ViewEvent& v) { return v.local_time > until_local; });
  view.erase(cut, view.end());
  return view;
}

}  // namespace mqsim
