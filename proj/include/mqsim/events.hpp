#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mqsim/time.hpp"

namespace mqsim {

using ProcessId = int;
using Value = long long;

enum class OpKind { enqueue, dequeue };

inline const char* op_name(OpKind k) { return k == OpKind::enqueue ? "enqueue" : "dequeue"; }

struct InvokeEvent {
  OpKind op;
  std::optional<Value> arg;  // enqueue only
  friend bool operator==(const InvokeEvent&, const InvokeEvent&) = default;
};

struct RespondEvent {
  OpKind op;
  std::optional<Value> value;  // dequeue: nullopt means the empty return
  friend bool operator==(const RespondEvent&, const RespondEvent&) = default;
};

struct SendEvent {
  ProcessId receiver;
  long long sequence;  // per-sender counter
  std::string payload;
  friend bool operator==(const SendEvent&, const SendEvent&) = default;
};

struct ReceiveEvent {
  ProcessId sender;
  long long sequence;
  std::string payload;
  friend bool operator==(const ReceiveEvent&, const ReceiveEvent&) = default;
};

struct TimerSetEvent {
  Time duration;
  std::string payload;
  friend bool operator==(const TimerSetEvent&, const TimerSetEvent&) = default;
};

struct TimerExpireEvent {
  std::string payload;
  friend bool operator==(const TimerExpireEvent&, const TimerExpireEvent&) = default;
};

using EventKind =
    std::variant<InvokeEvent, RespondEvent, SendEvent, ReceiveEvent, TimerSetEvent, TimerExpireEvent>;

struct EventRecord {
  ProcessId process;
  Time real_time;
  Time local_time;  // real_time + clock offset of the process
  EventKind kind;
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct MessageRecord {
  ProcessId sender;
  ProcessId receiver;
  Time send_time;
  Time receive_time;
  std::string payload;
  long long sequence;  // per-sender counter, matches the send/receive events

  Time delay() const { return receive_time - send_time; }
  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

}  // namespace mqsim
