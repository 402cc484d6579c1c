#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mqsim/run.hpp"

namespace mqsim {

// Per-process real-time displacement. Entries beyond the stored size are zero,
// so vectors of different lengths compose freely.
struct ShiftVector {
  std::vector<Time> offsets;

  static ShiftVector zeros(int n) { return ShiftVector{std::vector<Time>(static_cast<size_t>(n), Time(0))}; }

  static ShiftVector single(int n, ProcessId i, Time amount) {
    auto v = zeros(n);
    v.offsets.at(static_cast<size_t>(i)) = std::move(amount);
    return v;
  }

  Time at(ProcessId i) const {
    if (i < 0 || static_cast<size_t>(i) >= offsets.size()) return Time(0);
    return offsets[static_cast<size_t>(i)];
  }

  ShiftVector operator+(const ShiftVector& o) const {
    ShiftVector r = zeros(static_cast<int>(std::max(offsets.size(), o.offsets.size())));
    for (size_t i = 0; i < r.offsets.size(); ++i)
      r.offsets[i] = at(static_cast<ProcessId>(i)) + o.at(static_cast<ProcessId>(i));
    return r;
  }

  ShiftVector negate() const {
    ShiftVector r = *this;
    for (auto& t : r.offsets) t = -t;
    return r;
  }

  friend bool operator==(const ShiftVector&, const ShiftVector&) = default;
};

// Moves each process i later in real time by v[i] while retarding its clock by
// the same amount, so every local view is untouched. Message delays absorb the
// difference; a delay driven below zero is an error because the result would
// not be a run at all.
inline Run shift(const Run& run, const ShiftVector& v) {
  Run out = run;
  for (ProcessId p = 0; p < run.params.n; ++p) {
    const Time s = v.at(p);
    if (s.is_zero()) continue;
    out.clock_offsets[static_cast<size_t>(p)] -= s;
    for (auto& ev : out.events[static_cast<size_t>(p)]) ev.real_time += s;
  }
  for (auto& m : out.messages) {
    m.send_time += v.at(m.sender);
    m.receive_time += v.at(m.receiver);
    if (m.receive_time < m.send_time)
      throw std::invalid_argument("shift: negative delay on message from process " +
                                  std::to_string(m.sender) + " to " + std::to_string(m.receiver));
  }
  return out;
}

enum class ViolationKind { delay_too_small, delay_too_large, skew_exceeded };

inline const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::delay_too_small: return "delay_too_small";
    case ViolationKind::delay_too_large: return "delay_too_large";
    default: return "skew_exceeded";
  }
}

struct Violation {
  ViolationKind kind;
  Time amount;  // distance past the bound
  std::optional<MessageRecord> message;                     // delay violations
  std::optional<std::pair<ProcessId, ProcessId>> processes;  // skew violations
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct AdmissibilityVerdict {
  bool admissible = true;
  std::vector<Violation> violations;
};

inline Time max_clock_skew(const Run& run) {
  Time best(0);
  for (ProcessId i = 0; i < run.params.n; ++i)
    for (ProcessId j = i + 1; j < run.params.n; ++j) {
      Time skew = abs(run.clock_offsets[static_cast<size_t>(i)] - run.clock_offsets[static_cast<size_t>(j)]);
      best = max(best, skew);
    }
  return best;
}

// Every message delay must land in [d - u, d] and no two clocks may disagree
// by more than (1 - 1/n) u.
inline AdmissibilityVerdict is_admissible(const Run& run) {
  AdmissibilityVerdict verdict;
  const Time lo = run.params.d - run.params.u;
  const Time hi = run.params.d;
  for (const auto& m : run.messages) {
    const Time x = m.delay();
    if (x < lo)
      verdict.violations.push_back({ViolationKind::delay_too_small, lo - x, m, std::nullopt});
    else if (x > hi)
      verdict.violations.push_back({ViolationKind::delay_too_large, x - hi, m, std::nullopt});
  }
  const Time eps = epsilon(run.params);
  for (ProcessId i = 0; i < run.params.n; ++i)
    for (ProcessId j = i + 1; j < run.params.n; ++j) {
      Time skew = abs(run.clock_offsets[static_cast<size_t>(i)] - run.clock_offsets[static_cast<size_t>(j)]);
      if (skew > eps)
        verdict.violations.push_back({ViolationKind::skew_exceeded, skew - eps, std::nullopt,
                                      std::make_pair(i, j)});
    }
  verdict.admissible = verdict.violations.empty();
  return verdict;
}

inline bool runs_equal(const Run& a, const Run& b) { return a == b; }

// First local instant at which process p can tell the two runs apart, judging
// only by its own inputs. nullopt means the views agree in full.
inline std::optional<Time> earliest_distinguishing_time(const Run& a, const Run& b, ProcessId p) {
  const auto va = local_view_full(a, p);
  const auto vb = local_view_full(b, p);
  const size_t common = std::min(va.size(), vb.size());
  for (size_t i = 0; i < common; ++i)
    if (va[i] != vb[i]) return min(va[i].local_time, vb[i].local_time);
  if (va.size() > common) return va[common].local_time;
  if (vb.size() > common) return vb[common].local_time;
  return std::nullopt;
}

}  // namespace mqsim
