#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqsim/run.hpp"
#include "mqsim/schedule.hpp"
#include "mqsim/setlin.hpp"

// Line-delimited JSON traces. Each line is one record with a "type" field;
// keys are emitted in sorted order and rationals as decimal strings, so a
// trace is byte-stable under a serialize/parse round trip.

namespace mqsim {
namespace detail {

using json = nlohmann::json;

inline json time_to_json(const Time& t) { return json{{"num", t.num_str()}, {"den", t.den_str()}}; }

inline Time time_from_json(const json& j) {
  auto t = Time::parse(j.at("num").get<std::string>() + "/" + j.at("den").get<std::string>());
  if (!t) throw std::runtime_error("trace: malformed rational");
  return *t;
}

inline json opt_value_to_json(const std::optional<Value>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::optional<Value> opt_value_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<Value>();
}

inline json opt_time_to_json(const std::optional<Time>& t) {
  return t ? time_to_json(*t) : json(nullptr);
}

inline std::optional<Time> opt_time_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return time_from_json(j);
}

inline const char* op_kind_name(OpKind k) { return k == OpKind::enqueue ? "enqueue" : "dequeue"; }

inline OpKind op_kind_from(const std::string& s) {
  if (s == "enqueue") return OpKind::enqueue;
  if (s == "dequeue") return OpKind::dequeue;
  throw std::runtime_error("trace: unknown operation kind " + s);
}

inline json event_kind_to_json(const EventKind& kind) {
  json j;
  if (const auto* inv = std::get_if<InvokeEvent>(&kind)) {
    j["kind"] = "invoke";
    j["op"] = op_kind_name(inv->op);
    j["arg"] = opt_value_to_json(inv->arg);
  } else if (const auto* resp = std::get_if<RespondEvent>(&kind)) {
    j["kind"] = "respond";
    j["op"] = op_kind_name(resp->op);
    j["value"] = opt_value_to_json(resp->value);
  } else if (const auto* send = std::get_if<SendEvent>(&kind)) {
    j["kind"] = "send";
    j["receiver"] = send->receiver;
    j["sequence"] = send->sequence;
    j["payload"] = send->payload;
  } else if (const auto* recv = std::get_if<ReceiveEvent>(&kind)) {
    j["kind"] = "receive";
    j["sender"] = recv->sender;
    j["sequence"] = recv->sequence;
    j["payload"] = recv->payload;
  } else if (const auto* set = std::get_if<TimerSetEvent>(&kind)) {
    j["kind"] = "timer_set";
    j["duration"] = time_to_json(set->duration);
    j["payload"] = set->payload;
  } else {
    const auto& expire = std::get<TimerExpireEvent>(kind);
    j["kind"] = "timer_expire";
    j["payload"] = expire.payload;
  }
  return j;
}

inline EventKind event_kind_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "invoke")
    return InvokeEvent{op_kind_from(j.at("op").get<std::string>()), opt_value_from_json(j.at("arg"))};
  if (kind == "respond")
    return RespondEvent{op_kind_from(j.at("op").get<std::string>()), opt_value_from_json(j.at("value"))};
  if (kind == "send")
    return SendEvent{j.at("receiver").get<ProcessId>(), j.at("sequence").get<long long>(),
                     j.at("payload").get<std::string>()};
  if (kind == "receive")
    return ReceiveEvent{j.at("sender").get<ProcessId>(), j.at("sequence").get<long long>(),
                        j.at("payload").get<std::string>()};
  if (kind == "timer_set")
    return TimerSetEvent{time_from_json(j.at("duration")), j.at("payload").get<std::string>()};
  if (kind == "timer_expire") return TimerExpireEvent{j.at("payload").get<std::string>()};
  throw std::runtime_error("trace: unknown event kind " + kind);
}

inline json params_fields(const SystemParams& p) {
  return json{{"n", p.n}, {"d", time_to_json(p.d)}, {"u", time_to_json(p.u)}};
}

inline SystemParams params_from(const json& j) {
  SystemParams p;
  p.n = j.at("n").get<int>();
  p.d = time_from_json(j.at("d"));
  p.u = time_from_json(j.at("u"));
  return p;
}

inline std::vector<json> parse_lines(const std::string& text) {
  std::vector<json> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(json::parse(line));
  }
  if (records.empty()) throw std::runtime_error("trace: no records");
  return records;
}

}  // namespace detail

inline std::string run_to_trace(const Run& run) {
  using detail::json;
  std::string out;
  json header = detail::params_fields(run.params);
  header["type"] = "run_header";
  json offsets = json::array();
  for (const auto& c : run.clock_offsets) offsets.push_back(detail::time_to_json(c));
  header["clock_offsets"] = offsets;
  out += header.dump() + "\n";
  for (const auto& process_events : run.events)
    for (const auto& ev : process_events) {
      json j = detail::event_kind_to_json(ev.kind);
      j["type"] = "event";
      j["process"] = ev.process;
      j["real_time"] = detail::time_to_json(ev.real_time);
      j["local_time"] = detail::time_to_json(ev.local_time);
      out += j.dump() + "\n";
    }
  for (const auto& m : run.messages) {
    json j{{"type", "message"},
           {"sender", m.sender},
           {"receiver", m.receiver},
           {"send_time", detail::time_to_json(m.send_time)},
           {"receive_time", detail::time_to_json(m.receive_time)},
           {"payload", m.payload},
           {"sequence", m.sequence}};
    out += j.dump() + "\n";
  }
  return out;
}

inline Run run_from_trace(const std::string& text) {
  auto records = detail::parse_lines(text);
  if (records.front().at("type") != "run_header") throw std::runtime_error("trace: expected run_header");
  Run run;
  run.params = detail::params_from(records.front());
  for (const auto& c : records.front().at("clock_offsets"))
    run.clock_offsets.push_back(detail::time_from_json(c));
  run.events.resize(static_cast<size_t>(run.params.n));
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& j = records[i];
    const std::string type = j.at("type").get<std::string>();
    if (type == "event") {
      EventRecord ev;
      ev.process = j.at("process").get<ProcessId>();
      if (ev.process < 0 || ev.process >= run.params.n)
        throw std::runtime_error("trace: event process out of range");
      ev.real_time = detail::time_from_json(j.at("real_time"));
      ev.local_time = detail::time_from_json(j.at("local_time"));
      ev.kind = detail::event_kind_from_json(j);
      run.events[static_cast<size_t>(ev.process)].push_back(std::move(ev));
    } else if (type == "message") {
      MessageRecord m;
      m.sender = j.at("sender").get<ProcessId>();
      m.receiver = j.at("receiver").get<ProcessId>();
      m.send_time = detail::time_from_json(j.at("send_time"));
      m.receive_time = detail::time_from_json(j.at("receive_time"));
      m.payload = j.at("payload").get<std::string>();
      m.sequence = j.at("sequence").get<long long>();
      run.messages.push_back(std::move(m));
    } else {
      throw std::runtime_error("trace: unexpected record type " + type + " in run trace");
    }
  }
  canonicalize_messages(run.messages);
  validate_run(run);
  return run;
}

inline std::string history_to_trace(const History& h) {
  using detail::json;
  json header = detail::params_fields(h.params);
  header["type"] = "history_header";
  std::string out = header.dump() + "\n";
  for (const auto& ins : h.instances) {
    json j{{"type", "instance"},
           {"process", ins.process},
           {"kind", detail::op_kind_name(ins.kind)},
           {"argument", detail::opt_value_to_json(ins.argument)},
           {"return_value", detail::opt_value_to_json(ins.return_value)},
           {"invoke_time", detail::time_to_json(ins.invoke_time)},
           {"response_time", detail::time_to_json(ins.response_time)},
           {"instance_id", ins.instance_id}};
    out += j.dump() + "\n";
  }
  return out;
}

inline History history_from_trace(const std::string& text) {
  auto records = detail::parse_lines(text);
  if (records.front().at("type") != "history_header")
    throw std::runtime_error("trace: expected history_header");
  History h;
  h.params = detail::params_from(records.front());
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& j = records[i];
    if (j.at("type") != "instance")
      throw std::runtime_error("trace: unexpected record type in history trace");
    OperationInstance ins;
    ins.process = j.at("process").get<ProcessId>();
    ins.kind = detail::op_kind_from(j.at("kind").get<std::string>());
    ins.argument = detail::opt_value_from_json(j.at("argument"));
    ins.return_value = detail::opt_value_from_json(j.at("return_value"));
    ins.invoke_time = detail::time_from_json(j.at("invoke_time"));
    ins.response_time = detail::time_from_json(j.at("response_time"));
    ins.instance_id = j.at("instance_id").get<int>();
    h.instances.push_back(std::move(ins));
  }
  validate_history(h);
  return h;
}

inline std::string schedule_to_trace(const Schedule& sched) {
  using detail::json;
  json header = detail::params_fields(sched.params);
  header["type"] = "schedule_header";
  json offsets = json::array();
  for (const auto& c : sched.clock_offsets) offsets.push_back(detail::time_to_json(c));
  header["clock_offsets"] = offsets;
  header["default_delay"] = detail::time_to_json(sched.delay_policy.default_delay);
  std::string out = header.dump() + "\n";
  for (const auto& rule : sched.delay_policy.rules) {
    json j{{"type", "delay_rule"},
           {"sender", rule.sender ? json(*rule.sender) : json(nullptr)},
           {"receiver", rule.receiver ? json(*rule.receiver) : json(nullptr)},
           {"from_time", detail::opt_time_to_json(rule.from_time)},
           {"before_time", detail::opt_time_to_json(rule.before_time)},
           {"delay", detail::time_to_json(rule.delay)}};
    out += j.dump() + "\n";
  }
  for (const auto& inv : sched.invocations) {
    json j{{"type", "invocation"},
           {"process", inv.process},
           {"time", detail::time_to_json(inv.time)},
           {"op", detail::op_kind_name(inv.op)},
           {"argument", detail::opt_value_to_json(inv.argument)}};
    out += j.dump() + "\n";
  }
  return out;
}

inline Schedule schedule_from_trace(const std::string& text) {
  auto records = detail::parse_lines(text);
  if (records.front().at("type") != "schedule_header")
    throw std::runtime_error("trace: expected schedule_header");
  Schedule sched;
  sched.params = detail::params_from(records.front());
  for (const auto& c : records.front().at("clock_offsets"))
    sched.clock_offsets.push_back(detail::time_from_json(c));
  sched.delay_policy.default_delay = detail::time_from_json(records.front().at("default_delay"));
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& j = records[i];
    const std::string type = j.at("type").get<std::string>();
    if (type == "delay_rule") {
      DelayRule rule;
      if (!j.at("sender").is_null()) rule.sender = j.at("sender").get<ProcessId>();
      if (!j.at("receiver").is_null()) rule.receiver = j.at("receiver").get<ProcessId>();
      rule.from_time = detail::opt_time_from_json(j.at("from_time"));
      rule.before_time = detail::opt_time_from_json(j.at("before_time"));
      rule.delay = detail::time_from_json(j.at("delay"));
      sched.delay_policy.rules.push_back(std::move(rule));
    } else if (type == "invocation") {
      Invocation inv;
      inv.process = j.at("process").get<ProcessId>();
      inv.time = detail::time_from_json(j.at("time"));
      inv.op = detail::op_kind_from(j.at("op").get<std::string>());
      inv.argument = detail::opt_value_from_json(j.at("argument"));
      sched.invocations.push_back(std::move(inv));
    } else {
      throw std::runtime_error("trace: unexpected record type " + type + " in schedule trace");
    }
  }
  sched.validate();
  return sched;
}

inline std::string verdict_to_record(const CheckVerdict& verdict) {
  using detail::json;
  json j{{"type", "verdict"}, {"legal", verdict.legal}};
  if (verdict.witness) {
    json sets = json::array();
    for (const auto& set : verdict.witness->sequence) sets.push_back(set);
    j["witness"] = sets;
  } else {
    j["witness"] = nullptr;
  }
  j["violation"] = verdict.violation ? json(*verdict.violation) : json(nullptr);
  return j.dump() + "\n";
}

}  // namespace mqsim
