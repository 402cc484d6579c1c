#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mqsim/events.hpp"
#include "mqsim/params.hpp"

namespace mqsim {

// Mutable per-process state owned by the simulator. Concrete behaviors
// downcast to their own state type inside the handlers.
struct ProcessState {
  virtual ~ProcessState() = default;
};

struct SendAction {
  std::optional<ProcessId> to;  // nullopt broadcasts to all other processes
  std::string payload;
};
struct SetTimerAction {
  Time duration;  // measured on the local clock
  std::string payload;
};
struct RespondAction {
  OpKind op;
  std::optional<Value> value;  // dequeue result; nullopt is the empty return
};

using Action = std::variant<SendAction, SetTimerAction, RespondAction>;

// A deterministic protocol: handlers map each input to a list of actions.
// Handlers see only local time, never real time.
class ProcessBehavior {
 public:
  virtual ~ProcessBehavior() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<ProcessState> initial_state(ProcessId self, const SystemParams& params) const = 0;
  virtual std::vector<Action> on_invoke(ProcessState& state, OpKind op, const std::optional<Value>& arg,
                                        const Time& local_time) const = 0;
  virtual std::vector<Action> on_receive(ProcessState& state, ProcessId sender, const std::string& payload,
                                         const Time& local_time) const = 0;
  virtual std::vector<Action> on_timer_expire(ProcessState& state, const std::string& payload,
                                              const Time& local_time) const = 0;
};

}  // namespace mqsim
