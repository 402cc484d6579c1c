#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mqsim/run.hpp"

namespace mqsim {

// An ordered sequence of disjoint, non-empty sets of instance ids.
struct SetLinearization {
  std::vector<std::vector<int>> sequence;
  friend bool operator==(const SetLinearization&, const SetLinearization&) = default;
};

struct CheckVerdict {
  bool legal = false;
  std::optional<SetLinearization> witness;  // present exactly when legal
  std::optional<std::string> violation;     // present exactly when illegal
};

namespace detail {

inline std::string value_str(const std::optional<Value>& v) {
  return v ? std::to_string(*v) : std::string("empty");
}

inline const std::vector<const OperationInstance*>& by_id(const History& h,
                                                          std::vector<const OperationInstance*>& buf) {
  buf.assign(h.instances.size(), nullptr);
  for (const auto& ins : h.instances) {
    if (ins.instance_id < 0 || static_cast<size_t>(ins.instance_id) >= buf.size() ||
        buf[static_cast<size_t>(ins.instance_id)])
      throw std::invalid_argument("history: instance ids must be 0..m-1 and unique");
    buf[static_cast<size_t>(ins.instance_id)] = &ins;
  }
  return buf;
}

}  // namespace detail

// Verdict for one candidate sequence. A set of concurrent dequeues acts as a
// single dequeue on the abstract queue: every member returns the front value
// and exactly one element is consumed; with an empty queue every member
// returns empty and nothing is consumed. Enqueues must stand alone, and
// whenever one instance responds before another is invoked their sets must be
// ordered the same way.
inline CheckVerdict is_legal_sequence(const SetLinearization& seq, const History& h) {
  std::vector<const OperationInstance*> buf;
  const auto& inst = detail::by_id(h, buf);
  const int m = static_cast<int>(inst.size());

  std::vector<int> set_of(static_cast<size_t>(m), -1);
  int covered = 0;
  for (size_t si = 0; si < seq.sequence.size(); ++si) {
    if (seq.sequence[si].empty()) throw std::invalid_argument("coverage mismatch: empty set");
    for (int id : seq.sequence[si]) {
      if (id < 0 || id >= m || set_of[static_cast<size_t>(id)] != -1)
        throw std::invalid_argument("coverage mismatch: unknown or repeated instance id " +
                                    std::to_string(id));
      set_of[static_cast<size_t>(id)] = static_cast<int>(si);
      ++covered;
    }
  }
  if (covered != m) throw std::invalid_argument("coverage mismatch: sequence omits instances");

  auto illegal = [](std::string why) {
    CheckVerdict v;
    v.legal = false;
    v.violation = std::move(why);
    return v;
  };

  std::deque<Value> queue;
  for (const auto& set : seq.sequence) {
    if (set.size() > 1)
      for (int id : set)
        if (inst[static_cast<size_t>(id)]->kind == OpKind::enqueue)
          return illegal("clause (i): Enqueue instance " + std::to_string(id) +
                         " shares a set with another instance");
    const auto* first = inst[static_cast<size_t>(set.front())];
    if (first->kind == OpKind::enqueue) {
      queue.push_back(*first->argument);
      continue;
    }
    const std::optional<Value> value = first->return_value;
    for (int id : set)
      if (inst[static_cast<size_t>(id)]->return_value != value)
        return illegal("clause (ii): Dequeues in one set return " + detail::value_str(value) + " and " +
                       detail::value_str(inst[static_cast<size_t>(id)]->return_value));
    if (queue.empty()) {
      if (value)
        return illegal("clause (iii): Dequeue returns " + detail::value_str(value) +
                       " from an empty queue");
    } else {
      if (!value)
        return illegal("clause (iii): Dequeue returns empty while " + std::to_string(queue.front()) +
                       " is at the front");
      if (*value != queue.front())
        return illegal("clause (iii): Dequeue returns " + detail::value_str(value) + " but the front is " +
                       std::to_string(queue.front()));
      queue.pop_front();
    }
  }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && strictly_precedes(*inst[static_cast<size_t>(a)], *inst[static_cast<size_t>(b)]) &&
          set_of[static_cast<size_t>(a)] >= set_of[static_cast<size_t>(b)])
        return illegal("real-time order: instance " + std::to_string(a) + " responds before instance " +
                       std::to_string(b) + " is invoked but their sets are not ordered that way");

  CheckVerdict v;
  v.legal = true;
  v.witness = seq;
  return v;
}

namespace detail {

struct SearchContext {
  std::vector<const OperationInstance*> inst;
  std::vector<unsigned> preds;  // preds[i]: ids that must be fully placed before i
  unsigned full = 0;
};

inline SearchContext make_context(const History& h) {
  SearchContext ctx;
  by_id(h, ctx.inst);
  const int m = static_cast<int>(ctx.inst.size());
  ctx.preds.assign(static_cast<size_t>(m), 0u);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && strictly_precedes(*ctx.inst[static_cast<size_t>(a)], *ctx.inst[static_cast<size_t>(b)]))
        ctx.preds[static_cast<size_t>(b)] |= 1u << a;
  ctx.full = m == 0 ? 0u : (1u << m) - 1u;
  return ctx;
}

// Depth-first search over maximally constrained moves: each enqueue enters as
// a singleton, a value is consumed by the one set holding all of its
// dequeues, and empty-returning dequeues enter as singletons while the queue
// is empty. Any legal sequence can be rewritten move by move into this shape,
// so exhausting the move tree is a proof of illegality. Moves at each level
// are tried in lexicographic order of their id sets, so the first witness
// found is the lexicographically least one in this normal form.
inline bool setlin_dfs(const SearchContext& ctx, unsigned placed, std::vector<Value>& queue,
                       std::set<std::pair<unsigned, std::vector<Value>>>& dead,
                       std::vector<std::vector<int>>& path) {
  if (placed == ctx.full) return true;
  if (dead.count({placed, queue})) return false;
  const int m = static_cast<int>(ctx.inst.size());
  auto available = [&](int i) {
    return !(placed & (1u << i)) && (ctx.preds[static_cast<size_t>(i)] & ~placed) == 0;
  };

  std::vector<std::vector<int>> moves;
  for (int i = 0; i < m; ++i)
    if (ctx.inst[static_cast<size_t>(i)]->kind == OpKind::enqueue && available(i)) moves.push_back({i});
  if (!queue.empty()) {
    std::vector<int> group;
    bool ready = true;
    for (int i = 0; i < m; ++i) {
      const auto* ins = ctx.inst[static_cast<size_t>(i)];
      if (ins->kind != OpKind::dequeue || (placed & (1u << i))) continue;
      if (ins->return_value && *ins->return_value == queue.front()) {
        group.push_back(i);
        ready = ready && available(i);
      }
    }
    if (!group.empty() && ready) moves.push_back(std::move(group));
  } else {
    for (int i = 0; i < m; ++i) {
      const auto* ins = ctx.inst[static_cast<size_t>(i)];
      if (ins->kind == OpKind::dequeue && !ins->return_value && available(i)) moves.push_back({i});
    }
  }
  std::sort(moves.begin(), moves.end());

  for (auto& move : moves) {
    const bool is_enqueue = ctx.inst[static_cast<size_t>(move.front())]->kind == OpKind::enqueue;
    const bool consumes = !is_enqueue && !queue.empty();
    unsigned bits = 0;
    for (int i : move) bits |= 1u << i;
    path.push_back(move);
    if (is_enqueue) {
      queue.push_back(*ctx.inst[static_cast<size_t>(move.front())]->argument);
      if (setlin_dfs(ctx, placed | bits, queue, dead, path)) return true;
      queue.pop_back();
    } else if (consumes) {
      std::vector<Value> next(queue.begin() + 1, queue.end());
      if (setlin_dfs(ctx, placed | bits, next, dead, path)) {
        queue = std::move(next);
        return true;
      }
    } else {
      if (setlin_dfs(ctx, placed | bits, queue, dead, path)) return true;
    }
    path.pop_back();
  }

  dead.insert({placed, queue});
  return false;
}

}  // namespace detail

// Search for a witness sequence. Complete for histories within the cap; the
// returned witness is the first one found in a canonical move order, so
// verdicts and witnesses are deterministic.
inline CheckVerdict check_multiplicity_setlin(const History& h, int cap = 12) {
  if (static_cast<int>(h.instances.size()) > cap) throw std::invalid_argument("instance cap exceeded");
  auto ctx = detail::make_context(h);
  std::vector<Value> queue;
  std::set<std::pair<unsigned, std::vector<Value>>> dead;
  std::vector<std::vector<int>> path;
  CheckVerdict v;
  if (detail::setlin_dfs(ctx, 0u, queue, dead, path)) {
    v.legal = true;
    v.witness = SetLinearization{std::move(path)};
  } else {
    v.legal = false;
    v.violation = "no legal ordered set partition exists (search exhausted)";
  }
  return v;
}

namespace detail {

inline void build_partitions(unsigned remaining, std::vector<std::vector<int>>& current,
                             std::vector<SetLinearization>& out) {
  if (remaining == 0) {
    out.push_back(SetLinearization{current});
    return;
  }
  for (unsigned subset = remaining;; subset = (subset - 1) & remaining) {
    if (subset != 0) {
      std::vector<int> set;
      for (int i = 0; i < 32; ++i)
        if (subset & (1u << i)) set.push_back(i);
      current.push_back(std::move(set));
      build_partitions(remaining & ~subset, current, out);
      current.pop_back();
    }
    if (subset == 0) break;
  }
}

inline const std::vector<SetLinearization>& ordered_partitions(int m) {
  static std::array<std::optional<std::vector<SetLinearization>>, 7> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache.at(static_cast<size_t>(m));
  if (!slot) {
    std::vector<SetLinearization> out;
    std::vector<std::vector<int>> current;
    build_partitions(m == 0 ? 0u : (1u << m) - 1u, current, out);
    slot = std::move(out);
  }
  return *slot;
}

}  // namespace detail

// Independent oracle: try every ordered set partition. Usable only for tiny
// histories (the count for 6 instances is already 4683).
inline CheckVerdict brute_force_setlin(const History& h) {
  if (h.instances.size() > 6) throw std::invalid_argument("size cap exceeded: brute force handles at most 6 instances");
  for (const auto& candidate : detail::ordered_partitions(static_cast<int>(h.instances.size()))) {
    auto v = is_legal_sequence(candidate, h);
    if (v.legal) return v;
  }
  CheckVerdict v;
  v.legal = false;
  v.violation = "no legal ordered set partition exists (all candidates enumerated)";
  return v;
}

namespace detail {

inline bool lin_dfs(const SearchContext& ctx, unsigned placed, std::vector<Value>& queue,
                    std::set<std::pair<unsigned, std::vector<Value>>>& dead,
                    std::vector<std::vector<int>>& path) {
  if (placed == ctx.full) return true;
  if (dead.count({placed, queue})) return false;
  const int m = static_cast<int>(ctx.inst.size());
  for (int i = 0; i < m; ++i) {
    if (placed & (1u << i)) continue;
    if ((ctx.preds[static_cast<size_t>(i)] & ~placed) != 0) continue;
    const auto* ins = ctx.inst[static_cast<size_t>(i)];
    if (ins->kind == OpKind::enqueue) {
      path.push_back({i});
      queue.push_back(*ins->argument);
      if (lin_dfs(ctx, placed | (1u << i), queue, dead, path)) return true;
      queue.pop_back();
      path.pop_back();
    } else if (queue.empty() ? !ins->return_value
                             : (ins->return_value && *ins->return_value == queue.front())) {
      path.push_back({i});
      if (queue.empty()) {
        if (lin_dfs(ctx, placed | (1u << i), queue, dead, path)) return true;
      } else {
        std::vector<Value> next(queue.begin() + 1, queue.end());
        if (lin_dfs(ctx, placed | (1u << i), next, dead, path)) {
          queue = std::move(next);
          return true;
        }
      }
      path.pop_back();
    }
  }
  dead.insert({placed, queue});
  return false;
}

}  // namespace detail

// The all-singletons restriction: a strict FIFO linearization.
inline CheckVerdict check_linearizable_fifo(const History& h, int cap = 12) {
  if (static_cast<int>(h.instances.size()) > cap) throw std::invalid_argument("instance cap exceeded");
  auto ctx = detail::make_context(h);
  std::vector<Value> queue;
  std::set<std::pair<unsigned, std::vector<Value>>> dead;
  std::vector<std::vector<int>> path;
  CheckVerdict v;
  if (detail::lin_dfs(ctx, 0u, queue, dead, path)) {
    v.legal = true;
    v.witness = SetLinearization{std::move(path)};
  } else {
    v.legal = false;
    v.violation = "no linearization exists (search exhausted)";
  }
  return v;
}

// Builds the certificate sequence for a run of the zero-u algorithm with
// exactly synchronized bounds: enqueues become singletons stamped at local
// apply time, dequeues returning a value group by that value and take the
// earliest member's stamp, and empty-returning dequeues stand alone. The
// sequence is then validated like any other candidate.
inline std::pair<SetLinearization, CheckVerdict> construction4_certificate(const Run& run) {
  if (!run.params.u.is_zero())
    throw std::invalid_argument("construction4_certificate requires u = 0");
  const History h = extract_history(run);

  struct Stamp {
    Time clock;
    ProcessId pid;
    bool dequeue_set;
    bool operator<(const Stamp& o) const {
      if (clock != o.clock) return clock < o.clock;
      if (dequeue_set != o.dequeue_set) return !dequeue_set;
      return pid < o.pid;
    }
  };
  std::vector<std::pair<Stamp, std::vector<int>>> sets;

  std::map<Value, std::vector<int>> value_groups;
  for (const auto& ins : h.instances) {
    const Time local_invoke = ins.invoke_time + run.clock_offsets[static_cast<size_t>(ins.process)];
    if (ins.kind == OpKind::enqueue) {
      sets.push_back({Stamp{local_invoke + run.params.d / Time(2), ins.process, false},
                      {ins.instance_id}});
    } else if (!ins.return_value) {
      sets.push_back({Stamp{local_invoke, ins.process, true}, {ins.instance_id}});
    } else {
      value_groups[*ins.return_value].push_back(ins.instance_id);
    }
  }
  for (auto& [value, ids] : value_groups) {
    for (size_t a = 0; a < ids.size(); ++a)
      for (size_t b = 0; b < ids.size(); ++b) {
        if (a == b) continue;
        const auto& ia = h.instances[static_cast<size_t>(ids[a])];
        const auto& ib = h.instances[static_cast<size_t>(ids[b])];
        if (strictly_precedes(ia, ib))
          throw std::runtime_error("grouping collision: non-overlapping Dequeues both return " +
                                   std::to_string(value));
      }
    Stamp stamp{Time(0), 0, true};
    bool first = true;
    for (int id : ids) {
      const auto& ins = h.instances[static_cast<size_t>(id)];
      Stamp candidate{ins.invoke_time + run.clock_offsets[static_cast<size_t>(ins.process)], ins.process,
                      true};
      if (first || candidate < stamp) stamp = candidate;
      first = false;
    }
    sets.push_back({stamp, ids});
  }

  std::sort(sets.begin(), sets.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SetLinearization seq;
  for (auto& [stamp, ids] : sets) {
    std::sort(ids.begin(), ids.end());
    seq.sequence.push_back(std::move(ids));
  }
  return {seq, is_legal_sequence(seq, h)};
}

}  // namespace mqsim
