#include <doctest.h>
#include <mqsim/algorithms.hpp>
#include <mqsim/scenarios.hpp>
#include <mqsim/setlin.hpp>
#include <mqsim/simulator.hpp>
#include <mqsim/trace.hpp>

#include "support/schedule_gen.hpp"

using namespace mqsim;

namespace {

SystemParams params_of(int n, Time d, Time u) {
  SystemParams p;
  p.n = n;
  p.d = d;
  p.u = u;
  return p;
}

}  // namespace

TEST_CASE("run traces round-trip byte for byte") {
  const Schedule sched = testing::random_schedule(params_of(3, Time(10), Time(4)), 11u);
  const Run run = simulate(*full_info_fifo_baseline(), sched).run;

  const std::string text = run_to_trace(run);
  const Run back = run_from_trace(text);
  CHECK(back == run);
  CHECK(run_to_trace(back) == text);
}

TEST_CASE("history traces round-trip byte for byte") {
  const Schedule sched = testing::random_schedule(params_of(2, Time(10), Time(0)), 3u);
  const History h = extract_history(simulate(*zero_u_multiplicity_queue(), sched).run);

  const std::string text = history_to_trace(h);
  const History back = history_from_trace(text);
  CHECK(back == h);
  CHECK(history_to_trace(back) == text);
}

TEST_CASE("schedule traces round-trip byte for byte") {
  const ScenarioConfig cfg =
      ScenarioConfig::derive(params_of(4, Time(10), Time(2)), *full_info_fifo_baseline(), Time(4));
  for (const Schedule& sched :
       {build_Dk(cfg, 2), build_Sk(cfg, 3), build_S3X(cfg, Time(1, 4)).schedule,
        testing::random_schedule(cfg.params, 17u)}) {
    const std::string text = schedule_to_trace(sched);
    const Schedule back = schedule_from_trace(text);
    CHECK(back == sched);
    CHECK(schedule_to_trace(back) == text);
  }
}

TEST_CASE("a reparsed schedule replays to the identical run") {
  const Schedule sched = testing::random_schedule(params_of(3, Time(10), Time(4)), 29u);
  const Schedule back = schedule_from_trace(schedule_to_trace(sched));
  CHECK(runs_equal(simulate(*full_info_fifo_baseline(), sched).run,
                   simulate(*full_info_fifo_baseline(), back).run));
}

TEST_CASE("rationals survive the wire format exactly") {
  Run run;
  run.params = params_of(2, Time(10), Time(3));
  run.clock_offsets = {Time(0), Time(-7, 3)};
  run.events.resize(2);
  run.events[1].push_back(
      {1, Time(22, 7), Time(22, 7) - Time(7, 3), InvokeEvent{OpKind::dequeue, std::nullopt}});
  run.events[1].push_back(
      {1, Time(5), Time(5) - Time(7, 3), RespondEvent{OpKind::dequeue, std::nullopt}});
  const Run back = run_from_trace(run_to_trace(run));
  CHECK(back.clock_offsets[1] == Time(-7, 3));
  CHECK(back.events[1][0].real_time == Time(22, 7));
  CHECK(back == run);
}

TEST_CASE("verdict records") {
  CheckVerdict legal;
  legal.legal = true;
  legal.witness = SetLinearization{{{0}, {1, 2}}};
  const std::string line = verdict_to_record(legal);
  CHECK(line.find("\"legal\":true") != std::string::npos);
  CHECK(line.find("[1,2]") != std::string::npos);
  CHECK(line.find('\n') == line.size() - 1);

  CheckVerdict illegal;
  illegal.legal = false;
  illegal.violation = "clause (ii): mixed returns";
  const std::string bad = verdict_to_record(illegal);
  CHECK(bad.find("\"legal\":false") != std::string::npos);
  CHECK(bad.find("clause (ii)") != std::string::npos);
}

TEST_CASE("malformed traces are rejected") {
  CHECK_THROWS_WITH_AS(run_from_trace(""), doctest::Contains("no records"), std::runtime_error);
  CHECK_THROWS_WITH_AS(run_from_trace("{\"type\":\"history_header\"}\n"),
                       doctest::Contains("expected run_header"), std::runtime_error);
  CHECK_THROWS_WITH_AS(history_from_trace("{\"type\":\"run_header\"}\n"),
                       doctest::Contains("expected history_header"), std::runtime_error);
  CHECK_THROWS_WITH_AS(schedule_from_trace("{\"type\":\"verdict\"}\n"),
                       doctest::Contains("expected schedule_header"), std::runtime_error);

  const Schedule sched = testing::random_schedule(params_of(2, Time(10), Time(2)), 41u);
  std::string text = schedule_to_trace(sched);
  const auto pos = text.find("\"num\":\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos + 7, 1, "x");
  CHECK_THROWS_AS(schedule_from_trace(text), std::runtime_error);
}

TEST_CASE("blank lines are tolerated") {
  const Schedule sched = testing::random_schedule(params_of(2, Time(10), Time(2)), 43u);
  const Run run = simulate(*zero_u_multiplicity_queue(), sched).run;
  std::string text = run_to_trace(run);
  text.insert(0, "\n");
  const auto pos = text.find('\n', 5);
  text.insert(pos + 1, "\n\n");
  CHECK(run_from_trace(text) == run);
}
