#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqsim/schedule.hpp"
#include "mqsim/shifting.hpp"
#include "mqsim/simulator.hpp"

namespace mqsim {

// Anchors for the dequeue constructions: a prefix in which p0 enqueues
// 1..n, a time t1 by which that prefix is quiescent, and the assumed
// worst-case dequeue latency used by the feasibility analyses.
struct ScenarioConfig {
  SystemParams params;
  Time t1;
  Time dequeue_latency_bound;
  std::vector<Time> enqueue_times;  // invocation times of the prefix enqueues at p0

  // Spaces the prefix enqueues one quiescence apart under uniform delay d,
  // which upper-bounds every delay the builders later assign, and puts t1
  // one unit past the final quiescence.
  static ScenarioConfig derive(const SystemParams& params, const ProcessBehavior& behavior,
                               Time dequeue_latency_bound) {
    params.validate();
    ScenarioConfig cfg;
    cfg.params = params;
    cfg.dequeue_latency_bound = std::move(dequeue_latency_bound);
    Schedule prefix;
    prefix.params = params;
    prefix.clock_offsets.assign(static_cast<size_t>(params.n), Time(0));
    prefix.delay_policy = DelayPolicy::uniform(params.d);
    Time next(0);
    for (int i = 1; i <= params.n; ++i) {
      cfg.enqueue_times.push_back(next);
      prefix.invocations.push_back(Invocation{0, next, OpKind::enqueue, Value(i)});
      auto outcome = simulate(behavior, prefix);
      next = outcome.quiescence_times.back() + Time(1);
    }
    cfg.t1 = next;
    return cfg;
  }
};

inline Time t_star(const ScenarioConfig& cfg, int k) {
  if (k < 0 || k >= cfg.params.n) throw std::invalid_argument("t_star: k out of range");
  return cfg.t1 + Time(k) * (cfg.params.d - cfg.params.u);
}

namespace detail {

inline void append_prefix(Schedule& sched, const ScenarioConfig& cfg) {
  for (size_t i = 0; i < cfg.enqueue_times.size(); ++i)
    sched.invocations.push_back(
        Invocation{0, cfg.enqueue_times[i], OpKind::enqueue, Value(static_cast<long long>(i) + 1)});
}

inline DelayRule pair_rule(ProcessId a, ProcessId b, Time delay) {
  return DelayRule{a, b, std::nullopt, std::nullopt, std::move(delay)};
}

// lower→higher index d−u, higher→lower d, for every ordered pair
inline void append_staircase(std::vector<DelayRule>& rules, const SystemParams& p) {
  for (ProcessId a = 0; a < p.n; ++a)
    for (ProcessId b = 0; b < p.n; ++b)
      if (a != b) rules.push_back(pair_rule(a, b, a < b ? p.d - p.u : p.d));
}

// Staggered dequeues with the staircase delays plus the single slow edge
// p_{k−2}→p_{k−1} after t_star(k−2). Meaningful from k = 2, one step below
// the public entry point, because the k′ builder recurses one level down.
inline Schedule build_Sk_internal(const ScenarioConfig& cfg, int k) {
  const auto& p = cfg.params;
  if (k < 2 || k > p.n) throw std::invalid_argument("build_Sk: k out of range");
  Schedule sched;
  sched.params = p;
  append_prefix(sched, cfg);
  const Time s = stagger_s(p);
  for (ProcessId i = 0; i < k; ++i)
    sched.invocations.push_back(Invocation{i, cfg.t1 + Time(i) * s, OpKind::dequeue, std::nullopt});
  for (ProcessId i = 0; i < p.n; ++i)
    sched.clock_offsets.push_back(Time(i, p.n) * p.u);
  sched.delay_policy.default_delay = p.d;
  sched.delay_policy.rules.push_back(
      DelayRule{static_cast<ProcessId>(k - 2), static_cast<ProcessId>(k - 1), t_star(cfg, k - 2),
                std::nullopt, p.d});
  append_staircase(sched.delay_policy.rules, p);
  return sched;
}

}  // namespace detail

// k staggered dequeues against a two-group delay pattern: processes below k
// and processes at or above k each form a staircase group, messages from the
// low group to the high group take d, and the reverse direction takes d−u.
// The high group's dequeues run one stagger plus u behind schedule and their
// clocks sit behind by a full u relative to the pattern of the low group.
inline Schedule build_Dk(const ScenarioConfig& cfg, int k) {
  const auto& p = cfg.params;
  if (k < 1 || k > p.n) throw std::invalid_argument("build_Dk: k out of range");
  Schedule sched;
  sched.params = p;
  detail::append_prefix(sched, cfg);
  const Time s = stagger_s(p);
  for (ProcessId i = 0; i < k; ++i)
    sched.invocations.push_back(Invocation{i, cfg.t1 + Time(i) * s, OpKind::dequeue, std::nullopt});
  for (ProcessId j = k; j < p.n; ++j)
    sched.invocations.push_back(Invocation{j, cfg.t1 + Time(j) * s + p.u, OpKind::dequeue, std::nullopt});
  for (ProcessId i = 0; i < p.n; ++i)
    sched.clock_offsets.push_back(Time(i < k ? i : i - p.n, p.n) * p.u);
  sched.delay_policy.default_delay = p.d;
  auto& rules = sched.delay_policy.rules;
  for (ProcessId a = 0; a < p.n; ++a)
    for (ProcessId b = 0; b < p.n; ++b) {
      if (a == b) continue;
      const bool a_low = a < k, b_low = b < k;
      Time delay = a_low == b_low ? (a < b ? p.d - p.u : p.d) : (a_low ? p.d : p.d - p.u);
      rules.push_back(detail::pair_rule(a, b, std::move(delay)));
    }
  return sched;
}

inline Schedule build_Sk(const ScenarioConfig& cfg, int k) {
  if (k < 3 || k > cfg.params.n) throw std::invalid_argument("build_Sk: k out of range");
  return detail::build_Sk_internal(cfg, k);
}

// One level down plus a k-th dequeue, with the edge into the newcomer slowed
// after t_star(k−2); the rule is prepended so it outranks the inherited ones.
inline Schedule build_Sk_prime(const ScenarioConfig& cfg, int k) {
  const auto& p = cfg.params;
  if (k < 3 || k > p.n) throw std::invalid_argument("build_Sk_prime: k out of range");
  Schedule sched = detail::build_Sk_internal(cfg, k - 1);
  sched.invocations.push_back(
      Invocation{static_cast<ProcessId>(k - 1), cfg.t1 + Time(k - 1) * stagger_s(p), OpKind::dequeue,
                 std::nullopt});
  sched.delay_policy.rules.insert(
      sched.delay_policy.rules.begin(),
      DelayRule{static_cast<ProcessId>(k - 2), static_cast<ProcessId>(k - 1), t_star(cfg, k - 2),
                std::nullopt, p.d});
  return sched;
}

struct ScheduleWithWarnings {
  Schedule schedule;
  std::vector<std::string> warnings;  // non-empty when the construction leaves the admissible region
};

// The three-dequeue run with p1 pulled earlier by X in real time while its
// clock is pushed forward by X, and the delays around p1 patched so that the
// rest of the system cannot tell until p0's dequeue broadcast lands. Delay
// rules touching p1 take effect only for post-prefix sends; the prefix keeps
// the plain staircase so p1's early view is byte-for-byte that of the
// unshifted run.
inline ScheduleWithWarnings build_S3X(const ScenarioConfig& cfg, const Time& X) {
  const auto& p = cfg.params;
  if (p.n < 3) throw std::invalid_argument("build_S3X: requires n >= 3");
  ScheduleWithWarnings out;
  Schedule& sched = out.schedule;
  sched.params = p;
  detail::append_prefix(sched, cfg);
  const Time s = stagger_s(p);
  sched.invocations.push_back(Invocation{0, cfg.t1, OpKind::dequeue, std::nullopt});
  sched.invocations.push_back(Invocation{1, cfg.t1 + s - X, OpKind::dequeue, std::nullopt});
  sched.invocations.push_back(Invocation{2, cfg.t1 + Time(2) * s, OpKind::dequeue, std::nullopt});
  for (ProcessId i = 0; i < p.n; ++i) {
    Time c = Time(i, p.n) * p.u;
    if (i == 1) c += X;
    sched.clock_offsets.push_back(std::move(c));
  }
  sched.delay_policy.default_delay = p.d;
  auto& rules = sched.delay_policy.rules;
  rules.push_back(DelayRule{1, 2, t_star(cfg, 1) - X, std::nullopt, p.d});
  rules.push_back(DelayRule{1, 2, cfg.t1 - X, std::nullopt, p.d - p.u + X});
  rules.push_back(detail::pair_rule(1, 0, p.d));
  rules.push_back(DelayRule{1, std::nullopt, cfg.t1 - X, std::nullopt, p.d - p.u + X});
  rules.push_back(DelayRule{0, 1, cfg.t1, std::nullopt, p.d});
  rules.push_back(DelayRule{std::nullopt, 1, cfg.t1, std::nullopt, p.d - X});
  detail::append_staircase(rules, p);

  auto check_delay = [&](const char* cell, const Time& delay) {
    if (delay < p.d - p.u || delay > p.d)
      out.warnings.push_back(std::string("inadmissible by construction: delay ") + cell + " = " +
                             delay.str() + " outside [" + (p.d - p.u).str() + ", " + p.d.str() + "]");
  };
  check_delay("d-u+X (outgoing from p1)", p.d - p.u + X);
  check_delay("d-X (incoming to p1)", p.d - X);
  const Time eps = epsilon(p);
  Time skew(0);
  for (size_t i = 0; i < sched.clock_offsets.size(); ++i)
    for (size_t j = i + 1; j < sched.clock_offsets.size(); ++j)
      skew = max(skew, abs(sched.clock_offsets[i] - sched.clock_offsets[j]));
  if (skew > eps)
    out.warnings.push_back("inadmissible by construction: clock skew " + skew.str() +
                           " exceeds the bound " + eps.str());
  return out;
}

struct RationalInterval {
  Time lower;
  bool lower_strict = false;
  Time upper;
  bool upper_strict = false;

  bool empty() const { return lower > upper || (lower == upper && (lower_strict || upper_strict)); }

  bool contains(const Time& x) const {
    if (lower_strict ? !(x > lower) : !(x >= lower)) return false;
    return upper_strict ? x < upper : x <= upper;
  }

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

namespace detail {

inline void require_latency_bound(const ScenarioConfig& cfg) {
  if (!(cfg.dequeue_latency_bound > Time(0)) || !(cfg.dequeue_latency_bound < bound_Q(cfg.params)))
    throw std::invalid_argument("bound violated: dequeue latency bound must lie in (0, Q)");
}

}  // namespace detail

// Feasible range for the pull-back X: it must keep every patched delay inside
// [d−u, d], keep p1's clock within the skew budget, and stay large enough
// that the patched run still hides the change until the intended horizon.
inline RationalInterval x_constraint_interval(const ScenarioConfig& cfg) {
  detail::require_latency_bound(cfg);
  const auto& p = cfg.params;
  const Time D = cfg.dequeue_latency_bound;
  const Time Q = bound_Q(p);

  RationalInterval iv;
  iv.lower = Time(0);
  iv.lower_strict = false;
  const Time lower2 = D + Q - (p.d + p.u);
  if (lower2 > iv.lower) {
    iv.lower = lower2;
    iv.lower_strict = true;
  } else if (lower2 == iv.lower) {
    iv.lower_strict = true;
  }

  struct Upper {
    Time value;
    bool strict;
  };
  const Upper uppers[] = {{p.d - D, true},
                          {Time(2) * p.d + p.u - Time(2) * Q - D, true},
                          {Time(p.n - 2, p.n) * p.u, false}};
  iv.upper = uppers[0].value;
  iv.upper_strict = uppers[0].strict;
  for (const auto& u : uppers) {
    if (u.value < iv.upper) {
      iv.upper = u.value;
      iv.upper_strict = u.strict;
    } else if (u.value == iv.upper && u.strict) {
      iv.upper_strict = true;
    }
  }
  return iv;
}

struct MinimalNParts {
  int n0 = 0;  // least n keeping the latency bound under d/2 + (n−2)u/n
  int n1 = 0;  // least n exceeding Q/(d−u) + 1
  int n2 = 0;  // least n exceeding d/(d−Q)
  int result = 0;
};

namespace detail {

inline constexpr long long kMinimalNCap = 1'000'000;

inline long long floor_to_ll(const Time& x) {
  namespace mp = boost::multiprecision;
  mp::cpp_int num = numerator(x.raw()), den = denominator(x.raw());
  mp::cpp_int q = num / den;
  if (num < 0 && q * den != num) --q;
  if (q > kMinimalNCap + 1) throw std::overflow_error("minimal_n exceeds cap 1000000");
  if (q < -kMinimalNCap) return -kMinimalNCap;
  return q.convert_to<long long>();
}

inline int least_n_strictly_above(const Time& x) {
  long long n = floor_to_ll(x) + 1;
  if (n < 2) n = 2;
  if (n > kMinimalNCap) throw std::overflow_error("minimal_n exceeds cap 1000000");
  return static_cast<int>(n);
}

}  // namespace detail

inline MinimalNParts minimal_n_parts(const ScenarioConfig& cfg) {
  const auto& p = cfg.params;
  if (p.u == p.d) throw std::invalid_argument("undefined at u=d");
  detail::require_latency_bound(cfg);
  const Time Q = bound_Q(p);
  const Time D = cfg.dequeue_latency_bound;

  MinimalNParts parts;
  // D < d/2 + u - 2u/n  <=>  n > 2u / (d/2 + u - D)
  const Time slack = p.d / Time(2) + p.u - D;
  parts.n0 = detail::least_n_strictly_above(Time(2) * p.u / slack);
  parts.n1 = detail::least_n_strictly_above(Q / (p.d - p.u) + Time(1));
  parts.n2 = detail::least_n_strictly_above(p.d / (p.d - Q));
  parts.result = std::max({parts.n0, parts.n1, parts.n2});
  return parts;
}

inline int minimal_n(const ScenarioConfig& cfg) { return minimal_n_parts(cfg).result; }

struct Lemma1Entry {
  int k;
  bool equal;
  bool shifted_admissible;
  bool target_admissible;
};

// For each 2 <= k < n: pulling process k−1 earlier by u must turn the run of
// the (k−1)-family schedule into exactly the run of the k-family schedule,
// and both must be admissible.
inline std::vector<Lemma1Entry> verify_lemma1_chain(const ScenarioConfig& cfg,
                                                    const ProcessBehavior& behavior) {
  std::vector<Lemma1Entry> report;
  const int n = cfg.params.n;
  for (int k = 2; k < n; ++k) {
    const Run source = simulate(behavior, build_Dk(cfg, k - 1)).run;
    const Run target = simulate(behavior, build_Dk(cfg, k)).run;
    const Run shifted = shift(source, ShiftVector::single(n, k - 1, -cfg.params.u));
    report.push_back(Lemma1Entry{k, runs_equal(shifted, target), is_admissible(shifted).admissible,
                                 is_admissible(target).admissible});
  }
  return report;
}

}  // namespace mqsim
