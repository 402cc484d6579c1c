#include <doctest.h>
#include <mqsim/algorithms.hpp>
#include <mqsim/setlin.hpp>
#include <mqsim/simulator.hpp>

using namespace mqsim;

namespace {

Schedule base_schedule(int n, Time d, Time u) {
  Schedule s;
  s.params.n = n;
  s.params.d = d;
  s.params.u = u;
  s.clock_offsets.assign(static_cast<size_t>(n), Time(0));
  s.delay_policy = DelayPolicy::uniform(d);
  return s;
}

const OperationInstance& op_at(const History& h, ProcessId p, const Time& invoke) {
  for (const auto& ins : h.instances)
    if (ins.process == p && ins.invoke_time == invoke) return ins;
  throw std::runtime_error("no such operation in history");
}

}  // namespace

TEST_CASE("zero-skew algorithm answers in half the delay bound") {
  Schedule sched = base_schedule(2, Time(10), Time(0));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(40), OpKind::dequeue, std::nullopt});

  const History h = extract_history(simulate(*zero_u_multiplicity_queue(), sched).run);
  REQUIRE(h.instances.size() == 3);
  for (const auto& ins : h.instances) CHECK(ins.response_time - ins.invoke_time == Time(5));
  CHECK(op_at(h, 0, Time(20)).return_value == 1);
  CHECK_FALSE(op_at(h, 1, Time(40)).return_value.has_value());
}

TEST_CASE("zero-skew algorithm lets concurrent dequeues share one element") {
  Schedule sched = base_schedule(2, Time(10), Time(0));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(20), OpKind::dequeue, std::nullopt});

  const History h = extract_history(simulate(*zero_u_multiplicity_queue(), sched).run);
  CHECK(op_at(h, 0, Time(20)).return_value == 1);
  CHECK(op_at(h, 1, Time(20)).return_value == 1);

  const auto verdict = check_multiplicity_setlin(h);
  CHECK(verdict.legal);
  CHECK_FALSE(check_linearizable_fifo(h).legal);
}

TEST_CASE("a dequeued element is gone afterwards") {
  Schedule sched = base_schedule(3, Time(10), Time(0));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({2, Time(40), OpKind::dequeue, std::nullopt});

  const History h = extract_history(simulate(*zero_u_multiplicity_queue(), sched).run);
  CHECK(op_at(h, 0, Time(20)).return_value == 1);
  CHECK(op_at(h, 1, Time(20)).return_value == 1);
  CHECK_FALSE(op_at(h, 2, Time(40)).return_value.has_value());
  CHECK(check_multiplicity_setlin(h).legal);
}

TEST_CASE("baseline latency is the delay bound plus the skew bound") {
  SUBCASE("with uncertainty") {
    Schedule sched = base_schedule(4, Time(10), Time(2));
    sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
    sched.invocations.push_back({1, Time(30), OpKind::dequeue, std::nullopt});
    const History h = extract_history(simulate(*full_info_fifo_baseline(), sched).run);
    for (const auto& ins : h.instances) CHECK(ins.response_time - ins.invoke_time == Time(23, 2));
    CHECK(op_at(h, 1, Time(30)).return_value == 1);
  }
  SUBCASE("exact clocks") {
    Schedule sched = base_schedule(2, Time(10), Time(0));
    sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
    const History h = extract_history(simulate(*full_info_fifo_baseline(), sched).run);
    CHECK(h.instances[0].response_time - h.instances[0].invoke_time == Time(10));
  }
}

TEST_CASE("baseline replay keeps first-in first-out order") {
  Schedule sched = base_schedule(2, Time(10), Time(0));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::enqueue, 2});
  sched.invocations.push_back({0, Time(40), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(60), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({0, Time(80), OpKind::dequeue, std::nullopt});

  const History h = extract_history(simulate(*full_info_fifo_baseline(), sched).run);
  CHECK(op_at(h, 0, Time(40)).return_value == 1);
  CHECK(op_at(h, 1, Time(60)).return_value == 2);
  CHECK_FALSE(op_at(h, 0, Time(80)).return_value.has_value());
  CHECK(check_linearizable_fifo(h).legal);
}

TEST_CASE("an impatient wait breaks the full-information queue") {
  Schedule sched = base_schedule(2, Time(10), Time(0));
  sched.invocations.push_back({0, Time(0), OpKind::enqueue, 1});
  sched.invocations.push_back({0, Time(20), OpKind::dequeue, std::nullopt});
  sched.invocations.push_back({1, Time(24), OpKind::dequeue, std::nullopt});

  SUBCASE("impatient") {
    const History h = extract_history(simulate(*strawman_fast(Time(3)), sched).run);
    CHECK(op_at(h, 0, Time(20)).return_value == 1);
    CHECK(op_at(h, 1, Time(24)).return_value == 1);
    CHECK(op_at(h, 0, Time(20)).response_time == Time(23));
    CHECK(op_at(h, 1, Time(24)).response_time == Time(27));
    CHECK_FALSE(check_multiplicity_setlin(h).legal);
    CHECK_FALSE(check_linearizable_fifo(h).legal);
  }
  SUBCASE("patient") {
    const History h = extract_history(simulate(*full_info_fifo_baseline(), sched).run);
    CHECK(op_at(h, 0, Time(20)).return_value == 1);
    CHECK_FALSE(op_at(h, 1, Time(24)).return_value.has_value());
    CHECK(check_multiplicity_setlin(h).legal);
    CHECK(check_linearizable_fifo(h).legal);
  }
}

TEST_CASE("wait must be positive") {
  CHECK_THROWS_AS(strawman_fast(Time(0)), std::invalid_argument);
  CHECK_THROWS_AS(strawman_fast(Time(-1)), std::invalid_argument);
}

TEST_CASE("algorithms are found by name") {
  CHECK(behavior_by_name("zero-u")->name() == "zero-u");
  CHECK(behavior_by_name("baseline")->name() == "baseline");
  CHECK(behavior_by_name("strawman:59/10")->name() == "strawman:59/10");
  CHECK_THROWS_WITH_AS(behavior_by_name("bogus"), doctest::Contains("unknown algorithm"),
                       std::invalid_argument);
  CHECK_THROWS_AS(behavior_by_name("strawman:nope"), std::invalid_argument);
}
