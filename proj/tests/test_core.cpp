#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "bpmstp/core.hpp"
#include "bpmstp/rng.hpp"
#include "test_support.hpp"

using namespace bpmstp;
using test_support::make_instance;

namespace {

FrontPoint pt(int makespan, double tec, bool feasible = true,
              int unscheduled = 0) {
  FrontPoint p;
  p.obj = {makespan, tec};
  p.feasible = feasible;
  p.unscheduled = unscheduled;
  return p;
}

} // namespace

TEST_CASE("instance validation rejects structural defects") {
  Instance good = make_instance(2, 2, 5, {2, 1}, {2.0, 0.5}, {3, 1, 4, 1, 5});
  CHECK_NOTHROW(good.validate());
  CHECK(good.total_load() == 3);

  Instance bad = good;
  bad.n_jobs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.processing_times = {2};
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("expected 2 processing times"),
                       std::invalid_argument);

  bad = good;
  bad.processing_times = {2, 6}; // longer than the horizon
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("job 2"),
                       std::invalid_argument);

  bad = good;
  bad.processing_times = {2, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.consumption_rates = {2.0, -0.5};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("machine 2"),
                       std::invalid_argument);

  bad = good;
  bad.slot_costs[3] = -1.0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("slot 4"),
                       std::invalid_argument);

  bad = good;
  bad.consumption_rates[0] = 0.0; // zero rate is allowed
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("evaluate sums rate-weighted slot prices and takes the last slot") {
  Instance ins = make_instance(2, 2, 5, {2, 1}, {2.0, 0.5}, {3, 1, 4, 1, 5});
  FeasibleSchedule s;
  s.jobs = {{0, 2}, {1, 5}}; // job 1 over slots {2,3} on machine 1; job 2 at 5
  Objectives o = evaluate(ins, s);
  CHECK(o.makespan == 5);
  CHECK(o.tec == doctest::Approx(2.0 * (1 + 4) + 0.5 * 5).epsilon(1e-12));

  // The expanded form evaluates identically.
  Objectives o2 = evaluate(ins, s.to_schedule(ins));
  CHECK(o2.makespan == o.makespan);
  CHECK(o2.tec == doctest::Approx(o.tec).epsilon(1e-12));
}

TEST_CASE("evaluate accepts fragmented schedules and rejects broken ones") {
  Instance ins = make_instance(2, 1, 4, {2, 1}, {1.0}, {1, 10, 100, 1000});

  Schedule split;
  split.jobs.resize(2);
  split.jobs[0] = {0, {1, 3}}; // gap at 2 covered by job 2
  split.jobs[1] = {0, {2}};
  CHECK(classify(ins, split).cls == ScheduleClass::Split);
  Objectives o = evaluate(ins, split);
  CHECK(o.makespan == 3);
  CHECK(o.tec == doctest::Approx(1 + 100 + 10).epsilon(1e-12));

  Schedule preemptive;
  preemptive.jobs.resize(2);
  preemptive.jobs[0] = {0, {1, 3}}; // gap at 2 left idle
  preemptive.jobs[1] = {0, {4}};
  CHECK(classify(ins, preemptive).cls == ScheduleClass::PreemptiveNonSplit);
  CHECK(evaluate(ins, preemptive).makespan == 4);

  Schedule overlap;
  overlap.jobs.resize(2);
  overlap.jobs[0] = {0, {1, 2}};
  overlap.jobs[1] = {0, {2}};
  CHECK_THROWS_WITH_AS(evaluate(ins, overlap), doctest::Contains("overlap"),
                       std::invalid_argument);
}

TEST_CASE("classify distinguishes every schedule class and defect") {
  Instance ins = make_instance(2, 2, 4, {2, 1}, {1.0, 1.0}, {1, 1, 1, 1});

  Schedule s;
  s.jobs.resize(2);

  s.jobs[0] = {0, {1, 2}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).cls == ScheduleClass::Feasible);
  CHECK(classify(ins, s).reason == InvalidReason::None);

  s.jobs[0] = {0, {1, 3}};
  s.jobs[1] = {0, {2}};
  CHECK(classify(ins, s).cls == ScheduleClass::Split);

  s.jobs[0] = {0, {1, 3}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).cls == ScheduleClass::PreemptiveNonSplit);

  s.jobs[0] = {0, {1, 2}};
  s.jobs[1] = {0, {2}};
  CHECK(classify(ins, s).reason == InvalidReason::Overlap);

  s.jobs[0] = {-1, {1, 2}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::MissingJob);

  s.jobs[0] = {0, {}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::MissingJob);

  s.jobs[0] = {2, {1, 2}}; // machine index past the last machine
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::OutOfRangeSlot);

  s.jobs[0] = {0, {0, 1}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::OutOfRangeSlot);

  s.jobs[0] = {0, {4, 5}};
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::OutOfRangeSlot);

  s.jobs[0] = {0, {1}}; // too few slots for a length-2 job
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::WrongCardinality);

  s.jobs[0] = {0, {2, 2}}; // duplicate slot
  s.jobs[1] = {1, {1}};
  CHECK(classify(ins, s).reason == InvalidReason::WrongCardinality);

  s.jobs.pop_back(); // one job record short
  CHECK(classify(ins, s).reason == InvalidReason::MissingJob);
}

TEST_CASE("compact placements expand to the exact slot runs") {
  Instance ins = make_instance(3, 2, 6, {3, 1, 2}, {1.0, 1.0},
                               {1, 1, 1, 1, 1, 1});
  FeasibleSchedule s;
  s.jobs = {{1, 4}, {0, 1}, {0, 2}};
  Schedule e = s.to_schedule(ins);
  CHECK(e.jobs[0].machine == 1);
  CHECK(e.jobs[0].slots == std::vector<int>{4, 5, 6});
  CHECK(e.jobs[1].slots == std::vector<int>{1});
  CHECK(e.jobs[2].slots == std::vector<int>{2, 3});
}

TEST_CASE("objective equality uses the energy-cost tolerance") {
  CHECK(same_point({5, 10.0}, {5, 10.0 + 0.5e-9}));
  CHECK_FALSE(same_point({5, 10.0}, {5, 10.0 + 1e-6}));
  CHECK_FALSE(same_point({5, 10.0}, {6, 10.0}));
}

TEST_CASE("downsize truncates the horizon and checks its bounds") {
  Instance ins = make_instance(2, 1, 4, {2, 1}, {1.0}, {9, 8, 7, 6});
  Instance d = downsize(ins, 2);
  CHECK(d.n_slots == 2);
  CHECK(d.slot_costs == std::vector<double>{9, 8});
  CHECK(d.n_jobs == ins.n_jobs);
  CHECK(d.processing_times == ins.processing_times);

  Instance same = downsize(ins, 4);
  CHECK(same.slot_costs == ins.slot_costs);

  CHECK_THROWS_AS(downsize(ins, 0), std::invalid_argument);
  CHECK_THROWS_AS(downsize(ins, 5), std::invalid_argument);
}

TEST_CASE("derived tables match hand computation") {
  Instance ins = make_instance(3, 2, 5, {3, 1, 3}, {1.0, 2.0}, {4, 1, 3, 2, 5});
  DerivedData d = derive(ins, 4);

  CHECK(d.horizon == 4);
  CHECK(d.distinct_ptimes == std::vector<int>{1, 3});
  CHECK(d.jobs_by_ptime.at(1) == std::vector<int>{1});
  CHECK(d.jobs_by_ptime.at(3) == std::vector<int>{0, 2});
  CHECK(d.p_max == 3);
  CHECK(d.omega == 3);
  // total load 7 over 2 machines floors to 3, the longest job also needs 3.
  CHECK(d.k_lower == 3);

  REQUIRE(d.window_cost.at(1).size() == 4);
  CHECK(d.window_cost.at(1) == std::vector<double>{4, 1, 3, 2});
  REQUIRE(d.window_cost.at(3).size() == 2);
  CHECK(d.window_cost.at(3)[0] == doctest::Approx(4 + 1 + 3));
  CHECK(d.window_cost.at(3)[1] == doctest::Approx(1 + 3 + 2));

  REQUIRE(d.cum_price.size() == 2);
  CHECK(d.cum_price[0] == std::vector<double>{0, 4, 5, 8, 10});
  CHECK(d.cum_price[1] == std::vector<double>{0, 8, 10, 16, 20});

  // A job longer than the horizon simply has no start window.
  DerivedData tiny = derive(ins, 2);
  CHECK(tiny.window_cost.at(3).empty());
  CHECK(tiny.omega == 2);

  CHECK_THROWS_AS(derive(ins, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive(ins, 6), std::invalid_argument);
}

TEST_CASE("makespan lower bound is the max of load and longest-job bounds") {
  CHECK(lower_bound_makespan(make_instance(3, 2, 9, {3, 3, 3}, {1, 1},
                                           std::vector<double>(9, 1.0))) == 4);
  CHECK(lower_bound_makespan(make_instance(2, 2, 9, {5, 1}, {1, 1},
                                           std::vector<double>(9, 1.0))) == 5);
  CHECK(lower_bound_makespan(make_instance(2, 4, 9, {2, 2}, {1, 1, 1, 1},
                                           std::vector<double>(9, 1.0))) == 2);
}

TEST_CASE("pareto filter keeps exactly the non-dominated points") {
  std::vector<FrontPoint> pts = {
      pt(7, 23.0), pt(6, 24.0), pt(8, 23.0), // dominated by (7,23)
      pt(6, 25.0),                           // dominated by (6,24)
      pt(7, 23.0 + 0.5e-9),                  // duplicate within tolerance
  };
  Front f = pareto_filter(pts);
  REQUIRE(f.size() == 2);
  CHECK(f.points[0].obj.makespan == 6);
  CHECK(f.points[0].obj.tec == doctest::Approx(24.0));
  CHECK(f.points[1].obj.makespan == 7);
  CHECK(f.points[1].obj.tec == doctest::Approx(23.0));
}

TEST_CASE("pareto filter keeps the first-listed point among duplicates") {
  std::vector<FrontPoint> pts = {pt(5, 10.0, true, 0), pt(5, 10.0, false, 3)};
  Front f = pareto_filter(pts);
  REQUIRE(f.size() == 1);
  CHECK(f.points[0].feasible);
  CHECK(f.points[0].unscheduled == 0);
}

TEST_CASE("pareto filter is invariant under input order") {
  Rng rng(41);
  std::vector<FrontPoint> pts;
  for (int i = 0; i < 40; ++i)
    pts.push_back(pt(rng.uniform_int(1, 8), rng.uniform_int(0, 30)));
  Front a = pareto_filter(pts);
  for (int round = 0; round < 10; ++round) {
    rng.shuffle(pts);
    Front b = pareto_filter(pts);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(same_point(a.points[i].obj, b.points[i].obj));
  }
}

TEST_CASE("pareto filter output is sorted and mutually non-dominated") {
  Rng rng(17);
  for (int round = 0; round < 30; ++round) {
    std::vector<FrontPoint> pts;
    int count = rng.uniform_int(0, 25);
    for (int i = 0; i < count; ++i)
      pts.push_back(pt(rng.uniform_int(1, 10), rng.uniform_int(0, 20)));
    Front f = pareto_filter(pts);
    if (count == 0) {
      CHECK(f.empty());
      continue;
    }
    REQUIRE_FALSE(f.empty());
    for (std::size_t i = 1; i < f.size(); ++i) {
      CHECK(f.points[i - 1].obj.makespan < f.points[i].obj.makespan);
      CHECK(f.points[i - 1].obj.tec > f.points[i].obj.tec + kTecTolerance);
    }
    // Every input point is dominated by (or duplicates) some kept point.
    for (const auto& p : pts) {
      bool covered = false;
      for (const auto& q : f.points)
        if (q.obj.makespan <= p.obj.makespan &&
            q.obj.tec <= p.obj.tec + kTecTolerance)
          covered = true;
      CHECK(covered);
    }
  }
}
