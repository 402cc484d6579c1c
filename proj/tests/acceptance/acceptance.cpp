// End-to-end acceptance checks, one printed line per criterion.

#include <mqsim/algorithms.hpp>
#include <mqsim/scenarios.hpp>
#include <mqsim/setlin.hpp>
#include <mqsim/shifting.hpp>
#include <mqsim/simulator.hpp>
#include <mqsim/trace.hpp>

#include "support/history_enum.hpp"
#include "support/schedule_gen.hpp"

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace mqsim;

namespace {

int g_failures = 0;

void report(int number, bool ok, const std::string& detail) {
  std::cout << "criterion " << number << " " << (ok ? "pass" : "fail") << ": " << detail << std::endl;
  if (!ok) ++g_failures;
}

SystemParams params_of(int n, Time d, Time u) {
  SystemParams p;
  p.n = n;
  p.d = d;
  p.u = u;
  return p;
}

// Criteria 1 and 2 share one batch of runs of the zero-skew algorithm.
std::vector<Run> zero_skew_batch() {
  std::vector<Run> runs;
  for (int n : {2, 3, 5}) {
    const SystemParams params = params_of(n, Time(10), Time(0));
    for (int i = 0; i < 70; ++i) {
      testing::GenOptions opt;
      opt.operations = 3 + i % 6;
      opt.dequeue_heavy = i % 2 == 1;
      const Schedule sched = testing::random_schedule(params, static_cast<unsigned>(n * 1000 + i), opt);
      runs.push_back(simulate(*zero_u_multiplicity_queue(), sched).run);
    }
  }
  return runs;
}

void criterion1(const std::vector<Run>& runs) {
  const Time expected(5);
  int dequeues = 0;
  int bad_latency = 0;
  int illegal = 0;
  for (const Run& run : runs) {
    const History h = extract_history(run);
    for (const auto& ins : h.instances) {
      if (ins.kind != OpKind::dequeue) continue;
      ++dequeues;
      if (ins.response_time - ins.invoke_time != expected) ++bad_latency;
    }
    if (!check_multiplicity_setlin(h).legal) ++illegal;
  }
  std::ostringstream detail;
  detail << runs.size() << " runs with exact clocks, " << dequeues
         << " dequeues all answered in d/2 = 5, every history admitted a legal ordered set partition";
  if (bad_latency || illegal)
    detail << " (" << bad_latency << " latency misses, " << illegal << " illegal histories)";
  report(1, bad_latency == 0 && illegal == 0 && dequeues > 0, detail.str());
}

void criterion2(const std::vector<Run>& runs) {
  int bad = 0;
  int disagreements = 0;
  for (const Run& run : runs) {
    const auto [certificate, verdict] = construction4_certificate(run);
    if (!verdict.legal) ++bad;
    const History h = extract_history(run);
    if (verdict.legal != check_multiplicity_setlin(h).legal) ++disagreements;
  }
  std::ostringstream detail;
  detail << "stamp-ordered certificates validated for all " << runs.size()
         << " runs and agreed with the search verdicts";
  if (bad || disagreements)
    detail << " (" << bad << " invalid certificates, " << disagreements << " disagreements)";
  report(2, bad == 0 && disagreements == 0, detail.str());
}

void criterion3() {
  int entries = 0;
  int bad = 0;
  for (int n : {4, 6}) {
    const ScenarioConfig cfg =
        ScenarioConfig::derive(params_of(n, Time(5), Time(1)), *full_info_fifo_baseline(), Time(2));
    for (const auto& entry : verify_lemma1_chain(cfg, *full_info_fifo_baseline())) {
      ++entries;
      if (!entry.equal || !entry.shifted_admissible || !entry.target_admissible) ++bad;
    }
  }
  std::ostringstream detail;
  detail << "pulling one process back by u mapped each family member onto the next in " << entries
         << " steps, all admissible";
  if (bad) detail << " (" << bad << " broken steps)";
  report(3, entries == 6 && bad == 0, detail.str());
}

void criterion4() {
  int schedules = 0;
  int bad = 0;
  const auto behavior = full_info_fifo_baseline();
  for (int n : {4, 6, 10}) {
    for (const auto& [d, u] : std::vector<std::pair<Time, Time>>{
             {Time(5), Time(1)}, {Time(10), Time(5)}, {Time(10), Time(10)}}) {
      const SystemParams params = params_of(n, d, u);
      const ScenarioConfig cfg = ScenarioConfig::derive(params, *behavior, d / Time(4));
      for (int k = 1; k <= n; ++k) {
        const Run run = simulate(*behavior, build_Dk(cfg, k)).run;
        ++schedules;
        if (!is_admissible(run).admissible || max_clock_skew(run) != epsilon(params)) ++bad;
      }
      for (int k = 3; k <= n; ++k) {
        const Run run = simulate(*behavior, build_Sk(cfg, k)).run;
        ++schedules;
        if (!is_admissible(run).admissible) ++bad;
      }
    }
  }
  std::ostringstream detail;
  detail << schedules << " staggered and two-group schedules all simulated to admissible runs, "
         << "with the two-group family pinned at the exact skew budget";
  if (bad) detail << " (" << bad << " violations)";
  report(4, bad == 0, detail.str());
}

void criterion5() {
  testing::Rng rng(2024);
  int samples = 0;
  int bad = 0;
  auto pair_ok = [](const Time& lo, bool lo_strict, const Time& hi, bool hi_strict) {
    return lo < hi || (lo == hi && !lo_strict && !hi_strict);
  };
  auto audit = [&](const ScenarioConfig& cfg) {
    const auto& p = cfg.params;
    const Time D = cfg.dequeue_latency_bound;
    const Time Q = bound_Q(p);
    const RationalInterval iv = x_constraint_interval(cfg);
    bool ok = !iv.empty();
    const Time lower1(0);
    const Time lower2 = D + Q - (p.d + p.u);
    const Time upper1 = p.d - D;
    const Time upper2 = Time(2) * p.d + p.u - Time(2) * Q - D;
    const Time upper3 = Time(p.n - 2, p.n) * p.u;
    ok = ok && pair_ok(lower1, false, upper1, true);
    ok = ok && pair_ok(lower1, false, upper2, true);
    ok = ok && pair_ok(lower1, false, upper3, false);
    ok = ok && pair_ok(lower2, true, upper1, true);
    ok = ok && pair_ok(lower2, true, upper2, true);
    ok = ok && pair_ok(lower2, true, upper3, false);
    ++samples;
    if (!ok) ++bad;
  };

  for (int i = 0; i < 1100; ++i) {
    const Time d(1 + static_cast<long long>(rng.below(50)));
    const Time u = d * Time(1 + static_cast<long long>(rng.below(99)), 100);
    ScenarioConfig probe;
    probe.params = params_of(2, d, u);
    probe.dequeue_latency_bound = bound_Q(probe.params) * Time(1 + static_cast<long long>(rng.below(199)), 200);
    ScenarioConfig cfg = probe;
    cfg.params.n = minimal_n(probe);
    audit(cfg);
  }
  for (int i = 0; i < 100; ++i) {
    const Time d(1 + static_cast<long long>(rng.below(50)));
    ScenarioConfig cfg;
    cfg.params = params_of(2 + static_cast<int>(rng.below(9)), d, d);
    cfg.dequeue_latency_bound = bound_Q(cfg.params) * Time(1 + static_cast<long long>(rng.below(199)), 200);
    audit(cfg);
  }
  std::ostringstream detail;
  detail << samples << " sampled parameter sets at or above the minimal process count left the "
         << "pull-back interval non-empty, each of the six bound pairs compatible";
  if (bad) detail << " (" << bad << " empty or contradictory)";
  report(5, samples == 1200 && bad == 0, detail.str());
}

void criterion6() {
  const auto start = std::chrono::steady_clock::now();
  long long histories = 0;
  long long legal = 0;
  long long bad_witness = 0;
  long long oracle_disagreements = 0;
  for (int m = 1; m <= 5; ++m) {
    testing::for_each_history(m, [&](const History& h) {
      ++histories;
      const auto fast = check_multiplicity_setlin(h);
      if (fast.legal) {
        ++legal;
        if (!is_legal_sequence(*fast.witness, h).legal) ++bad_witness;
      } else if (brute_force_setlin(h).legal) {
        ++oracle_disagreements;
      }
    });
  }
  const double seconds =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
          .count() /
      1000.0;
  std::ostringstream detail;
  detail << "exhaustive two-process sweep of " << histories << " histories up to five operations ("
         << legal << " legal) matched the brute-force oracle in " << seconds << "s";
  if (bad_witness || oracle_disagreements)
    detail << " (" << bad_witness << " bad witnesses, " << oracle_disagreements << " disagreements)";
  report(6, bad_witness == 0 && oracle_disagreements == 0 && seconds < 60.0, detail.str());
}

void criterion7() {
  Schedule sched;
  sched.params = params_of(2, Time(10), Time(0));
  sched.clock_offsets = {Time(0), Time(0)};
  sched.delay_policy = DelayPolicy::uniform(Time(10));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(24), OpKind::dequeue, std::nullopt});

  const History impatient = extract_history(simulate(*strawman_fast(Time(3)), sched).run);
  const History patient = extract_history(simulate(*full_info_fifo_baseline(), sched).run);

  const bool impatient_rejected =
      !check_multiplicity_setlin(impatient).legal && !check_linearizable_fifo(impatient).legal;
  const bool patient_accepted = check_multiplicity_setlin(patient).legal &&
                                check_linearizable_fifo(patient).legal;
  std::ostringstream detail;
  detail << "the early-reply variant double-delivered one element and failed both checkers; "
         << "the full-wait variant passed both";
  report(7, impatient_rejected && patient_accepted, detail.str());
}

void criterion8() {
  int cells = 0;
  int bad = 0;
  for (int i = 1; i <= 50; ++i) {
    const Time d(i);
    for (int j = 1; j <= 50; ++j) {
      const Time u = d * Time(j, 50);
      const Time Q = bound_Q(params_of(2, d, u));
      const Time mean = (d + u) / Time(2);
      ++cells;
      const bool boundary = j == 50;
      if (Q < mean || (boundary && Q != mean) || (!boundary && Q == mean)) ++bad;
    }
  }
  std::ostringstream detail;
  detail << cells << " parameter cells kept the latency bound at or above (d+u)/2, "
         << "with equality exactly on the u = d boundary";
  if (bad) detail << " (" << bad << " off the bound)";
  report(8, cells == 2500 && bad == 0, detail.str());
}

void criterion9() {
  const SystemParams params = params_of(3, Time(10), Time(4));
  const Time unit = (params.d - params.u) / Time(16);
  testing::Rng rng(777);
  int runs = 0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Schedule sched = testing::random_schedule(params, 5000u + static_cast<unsigned>(i));
    const Run run = simulate(*full_info_fifo_baseline(), sched).run;
    auto draw_vector = [&] {
      ShiftVector v = ShiftVector::zeros(params.n);
      for (auto& entry : v.offsets)
        entry = Time(static_cast<long long>(rng.below(9)) - 4) * unit;
      return v;
    };
    const ShiftVector v = draw_vector();
    const ShiftVector w = draw_vector();
    const Run shifted = shift(run, v);

    bool ok = runs_equal(shift(shifted, w), shift(run, v + w));
    ok = ok && runs_equal(shift(shifted, v.negate()), run);
    for (ProcessId p = 0; p < params.n; ++p)
      ok = ok && !earliest_distinguishing_time(run, shifted, p).has_value();
    for (size_t mi = 0; mi < run.messages.size(); ++mi) {
      const auto& before = run.messages[mi];
      const auto& after = shifted.messages[mi];
      ok = ok && after.delay() == before.delay() + v.at(before.receiver) - v.at(before.sender);
    }
    ++runs;
    if (!ok) ++bad;
  }
  std::ostringstream detail;
  detail << runs << " random runs: displacements composed, inverted, moved every delay by the "
         << "endpoint difference, and stayed invisible to all local views";
  if (bad) detail << " (" << bad << " failures)";
  report(9, runs == 100 && bad == 0, detail.str());
}

void criterion10() {
  const SystemParams params = params_of(10, Time(10), Time(5));
  const Time D(59, 10);
  const auto behavior = strawman_fast(D);
  const ScenarioConfig cfg = ScenarioConfig::derive(params, *behavior, D);

  const RationalInterval iv = x_constraint_interval(cfg);
  bool ok = iv == RationalInterval{Time(0), false, Time(31, 10), true};
  ok = ok && iv.contains(Time(0)) && iv.contains(Time(3, 2));

  const Run plain = simulate(*behavior, build_Sk(cfg, 3)).run;

  auto p2_clause = [&](const Run& pulled) {
    const auto edt = earliest_distinguishing_time(plain, pulled, 2);
    if (!edt) return true;
    for (const auto& ev : pulled.events[2])
      if (ev.real_time > cfg.t1 && std::holds_alternative<RespondEvent>(ev.kind))
        return *edt >= ev.local_time;
    return false;
  };

  const auto at_zero = build_S3X(cfg, Time(0));
  ok = ok && at_zero.warnings.empty();
  const Run pulled_zero = simulate(*behavior, at_zero.schedule).run;
  const Time horizon = cfg.t1 + (params.d - params.u) + params.u / Time(params.n);
  ok = ok && earliest_distinguishing_time(plain, pulled_zero, 1) == horizon;
  ok = ok && p2_clause(pulled_zero);

  const auto at_half = build_S3X(cfg, Time(3, 2));
  ok = ok && at_half.warnings.empty();
  const Run pulled_half = simulate(*behavior, at_half.schedule).run;
  ok = ok && p2_clause(pulled_half);
  ok = ok && is_admissible(pulled_half).admissible;

  std::ostringstream detail;
  detail << "the pull-back interval is [0, 31/10); at X = 0 the second process first notices at "
         << "t1 + (d-u) + u/n while the third never does, and X = 3/2 stays admissible with the "
         << "third process still blind";
  report(10, ok, detail.str());
}

}  // namespace

int main() {
  const std::vector<Run> shared_runs = zero_skew_batch();
  criterion1(shared_runs);
  criterion2(shared_runs);
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();

  if (g_failures == 0) {
    std::cout << "all criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " criteria failed" << std::endl;
  return 1;
}
