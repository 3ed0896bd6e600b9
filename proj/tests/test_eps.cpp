#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bpmstp/bench.hpp"
#include "bpmstp/core.hpp"
#include "bpmstp/eps.hpp"
#include "bpmstp/heuristics.hpp"
#include "bpmstp/rng.hpp"
#include "bpmstp/timeline.hpp"
#include "test_support.hpp"

using namespace bpmstp;
using test_support::make_instance;

namespace {

// One machine, nine slots, a length-3 job at slot 2 and two unit jobs at
// slots 6 and 8. Current energy cost 12 + 4 + 4 = 20; the only improving
// swap moves the long job into [6, 8] and the unit jobs to slots 2 and 3,
// for a cost of 13 + 1 + 1 = 15.
Instance swap_demo_instance() {
  return make_instance(3, 1, 9, {3, 1, 1}, {1.0}, {7, 1, 1, 10, 6, 4, 5, 4, 6});
}

FeasibleSchedule swap_demo_schedule() {
  FeasibleSchedule s;
  s.jobs = {{0, 2}, {0, 6}, {0, 8}};
  return s;
}

const EpsRecord& record_at(const std::map<long long, EpsRecord>& m,
                           int horizon, int machine, int start) {
  auto it = m.find(eps_key(horizon, machine, start));
  REQUIRE(it != m.end());
  return it->second;
}

bool records_equal(const EpsRecord& a, const EpsRecord& b) {
  if (a.machine != b.machine || a.start != b.start || a.length != b.length ||
      a.kind != b.kind || a.member_jobs != b.member_jobs ||
      a.assigned_count != b.assigned_count)
    return false;
  if (std::fabs(a.window_sum - b.window_sum) > 1e-9) return false;
  if (std::fabs(a.sub_tec - b.sub_tec) > 1e-9) return false;
  if (a.sorted_prefix.size() != b.sorted_prefix.size()) return false;
  for (std::size_t i = 0; i < a.sorted_prefix.size(); ++i)
    if (std::fabs(a.sorted_prefix[i] - b.sorted_prefix[i]) > 1e-9) return false;
  return true;
}

bool index_equal(const EpsIndex& a, const EpsIndex& b) {
  auto maps_equal = [](const std::map<int, std::map<long long, EpsRecord>>& x,
                       const std::map<int, std::map<long long, EpsRecord>>& y) {
    auto flat = [](const std::map<int, std::map<long long, EpsRecord>>& m) {
      std::vector<const EpsRecord*> out;
      for (const auto& [len, inner] : m) {
        (void)len;
        for (const auto& [key, r] : inner) {
          (void)key;
          out.push_back(&r);
        }
      }
      return out;
    };
    auto fx = flat(x), fy = flat(y);
    if (fx.size() != fy.size()) return false;
    for (std::size_t i = 0; i < fx.size(); ++i)
      if (!records_equal(*fx[i], *fy[i])) return false;
    return true;
  };
  return maps_equal(a.job_windows, b.job_windows) &&
         maps_equal(a.idle_windows, b.idle_windows);
}

} // namespace

TEST_CASE("window scan finds exactly the exchangeable windows") {
  Instance ins = swap_demo_instance();
  FeasibleSchedule s = swap_demo_schedule();
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);
  CHECK(idx.horizon == 9);

  // Single-job windows: the triple at [2,4] and the two unit jobs.
  REQUIRE(idx.job_windows[3].size() == 1);
  REQUIRE(idx.job_windows[1].size() == 2);
  const EpsRecord& j3 = record_at(idx.job_windows[3], 9, 0, 2);
  CHECK(j3.kind == EpsKind::JobOnly);
  CHECK(j3.length == 3);
  CHECK(j3.member_jobs == std::vector<int>{0});
  CHECK(j3.assigned_count == 3);
  CHECK(j3.window_sum == doctest::Approx(12.0));
  CHECK(j3.sub_tec == doctest::Approx(12.0));
  REQUIRE(j3.sorted_prefix.size() == 4);
  CHECK(j3.sorted_prefix[0] == doctest::Approx(0.0));
  CHECK(j3.sorted_prefix[1] == doctest::Approx(1.0));
  CHECK(j3.sorted_prefix[2] == doctest::Approx(2.0));
  CHECK(j3.sorted_prefix[3] == doctest::Approx(12.0));
  CHECK(record_at(idx.job_windows[1], 9, 0, 6).sub_tec == doctest::Approx(4.0));
  CHECK(record_at(idx.job_windows[1], 9, 0, 8).sub_tec == doctest::Approx(4.0));

  // Idle windows of length 3: [5,7], [6,8], [7,9] and nothing else (any
  // window cut by the long job is not exchangeable).
  REQUIRE(idx.idle_windows[3].size() == 3);
  const EpsRecord& i567 = record_at(idx.idle_windows[3], 9, 0, 5);
  CHECK(i567.assigned_count == 1);
  CHECK(i567.member_jobs == std::vector<int>{1});
  CHECK(i567.window_sum == doctest::Approx(15.0));
  CHECK(i567.sub_tec == doctest::Approx(4.0));
  const EpsRecord& i678 = record_at(idx.idle_windows[3], 9, 0, 6);
  CHECK(i678.assigned_count == 2);
  CHECK(i678.member_jobs == std::vector<int>{1, 2});
  CHECK(i678.window_sum == doctest::Approx(13.0));
  CHECK(i678.sub_tec == doctest::Approx(8.0));
  const EpsRecord& i789 = record_at(idx.idle_windows[3], 9, 0, 7);
  CHECK(i789.assigned_count == 1);
  CHECK(i789.member_jobs == std::vector<int>{2});
  CHECK(i789.window_sum == doctest::Approx(15.0));

  // Idle windows of length 1: the four idle slots.
  REQUIRE(idx.idle_windows[1].size() == 4);
  for (int start : {1, 5, 7, 9}) {
    const EpsRecord& r = record_at(idx.idle_windows[1], 9, 0, start);
    CHECK(r.assigned_count == 0);
    CHECK(r.window_sum == doctest::Approx(ins.slot_costs[start - 1]));
  }
}

TEST_CASE("window scan respects machine, range, and length filters") {
  Instance ins = swap_demo_instance();
  Timelines tl = Timelines::from(ins, swap_demo_schedule());

  std::vector<EpsRecord> jobs, idles;
  find_eps(ins, tl, {0}, 5, 9, {3}, &jobs, &idles);
  CHECK(jobs.empty()); // the only length-3 job window starts at slot 2
  REQUIRE(idles.size() == 3);
  CHECK(idles[0].start == 5);
  CHECK(idles[1].start == 6);
  CHECK(idles[2].start == 7);

  // Out-of-range bounds clamp instead of failing.
  jobs.clear();
  idles.clear();
  find_eps(ins, tl, {0}, -5, 99, {3}, &jobs, &idles);
  CHECK(jobs.size() == 1);
  CHECK(idles.size() == 3);
}

TEST_CASE("window scan scales costs by the machine rate") {
  Instance ins = make_instance(2, 2, 4, {2, 2}, {1.0, 3.0}, {4, 1, 2, 8});
  FeasibleSchedule s;
  s.jobs = {{0, 1}, {1, 2}};
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);

  const EpsRecord& fast = record_at(idx.job_windows[2], 4, 0, 1);
  CHECK(fast.sub_tec == doctest::Approx(5.0));
  const EpsRecord& slow = record_at(idx.job_windows[2], 4, 1, 2);
  CHECK(slow.sub_tec == doctest::Approx(3 * (1 + 2)));
  const EpsRecord& tail = record_at(idx.idle_windows[2], 4, 0, 3);
  CHECK(tail.window_sum == doctest::Approx(10.0));
  CHECK(tail.sorted_prefix[1] == doctest::Approx(2.0));
}

TEST_CASE("move screening matches the worked swap example") {
  Instance ins = swap_demo_instance();
  FeasibleSchedule s = swap_demo_schedule();
  CHECK(evaluate(ins, s).tec == doctest::Approx(20.0));
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);
  const EpsRecord& source = record_at(idx.job_windows[3], 9, 0, 2);

  // Bound arithmetic: 4+12 <= 15+1 and 4+12 <= 15+1 prune the outer targets;
  // 8+12 > 13+2 lets the middle one through.
  EpsMoveResult left =
      evaluate_eps_move(ins, s, record_at(idx.idle_windows[3], 9, 0, 5), source);
  CHECK(left.outcome == EpsMoveOutcome::PrunedByBound);
  EpsMoveResult right =
      evaluate_eps_move(ins, s, record_at(idx.idle_windows[3], 9, 0, 7), source);
  CHECK(right.outcome == EpsMoveOutcome::PrunedByBound);

  EpsMoveResult mid =
      evaluate_eps_move(ins, s, record_at(idx.idle_windows[3], 9, 0, 6), source);
  REQUIRE(mid.outcome == EpsMoveOutcome::Applied);
  CHECK(mid.delta == doctest::Approx(-5.0));
  Objectives o = evaluate(ins, mid.schedule);
  CHECK(o.makespan == 8);
  CHECK(o.tec == doctest::Approx(15.0));
  CHECK(mid.schedule.jobs[0].start == 6);
  CHECK(mid.schedule.jobs[1].start == 2);
  CHECK(mid.schedule.jobs[2].start == 3);

  // The pruned swaps really are non-improving: apply them anyway.
  for (int start : {5, 7}) {
    EpsMoveResult forced = apply_eps_move_unchecked(
        ins, s, record_at(idx.idle_windows[3], 9, 0, start), source);
    CHECK(forced.delta >= -kTecTolerance);
  }
}

TEST_CASE("moves that would stretch the makespan are skipped") {
  Instance ins = make_instance(2, 1, 6, {2, 1}, {1.0}, {9, 9, 1, 1, 1, 9});
  FeasibleSchedule s;
  s.jobs = {{0, 1}, {0, 3}};
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);
  const EpsRecord& source = record_at(idx.job_windows[2], 6, 0, 1);
  const EpsRecord& target = record_at(idx.idle_windows[2], 6, 0, 4);

  EpsMoveResult r = evaluate_eps_move(ins, s, target, source);
  CHECK(r.outcome == EpsMoveOutcome::SkippedMakespan);
  CHECK(r.delta == doctest::Approx(0.0));
  // Untouched input comes back.
  CHECK(r.schedule.jobs[0].start == 1);
  CHECK(r.schedule.jobs[1].start == 3);

  EpsMoveResult forced = apply_eps_move_unchecked(ins, s, target, source);
  CHECK(evaluate(ins, forced.schedule).makespan >
        evaluate(ins, s).makespan);
  CHECK(forced.delta < 0.0); // cheaper, but at the cost of the horizon
}

TEST_CASE("move evaluation validates its window records") {
  Instance ins = swap_demo_instance();
  FeasibleSchedule s = swap_demo_schedule();
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);
  const EpsRecord& source = record_at(idx.job_windows[3], 9, 0, 2);
  const EpsRecord& target = record_at(idx.idle_windows[3], 9, 0, 6);

  CHECK_THROWS_WITH_AS(evaluate_eps_move(ins, s, source, source),
                       doctest::Contains("wrong window kinds"),
                       std::invalid_argument);

  EpsRecord short_target = record_at(idx.idle_windows[1], 9, 0, 5);
  CHECK_THROWS_WITH_AS(evaluate_eps_move(ins, s, short_target, source),
                       doctest::Contains("lengths differ"),
                       std::invalid_argument);

  EpsRecord overlapping = target;
  overlapping.start = 4;
  CHECK_THROWS_WITH_AS(evaluate_eps_move(ins, s, overlapping, source),
                       doctest::Contains("overlap"), std::invalid_argument);

  EpsRecord stale = source;
  stale.start = 3;
  EpsRecord far_target = record_at(idx.idle_windows[3], 9, 0, 7);
  CHECK_THROWS_WITH_AS(evaluate_eps_move(ins, s, far_target, stale),
                       doctest::Contains("does not match"),
                       std::invalid_argument);
}

TEST_CASE("incremental index updates equal a from-scratch rebuild") {
  Instance ins = make_instance(4, 2, 10, {3, 2, 2, 1}, {1.0, 2.0},
                               {3, 1, 4, 1, 5, 9, 2, 6, 5, 3});
  FeasibleSchedule s;
  s.jobs = {{0, 2}, {0, 7}, {1, 1}, {1, 5}};
  Timelines tl = Timelines::from(ins, s);
  EpsIndex idx = build_eps_index(ins, tl);

  // A no-op update changes nothing.
  update_eps(ins, tl, idx, 0, 1, 10);
  CHECK(index_equal(idx, build_eps_index(ins, tl)));

  // Slide job 2 from [7,8] to [5,6] on machine 1 (0-based machine 0).
  tl.machines[0].erase_at(7);
  REQUIRE(tl.machines[0].insert(1, 5, 2));
  update_eps(ins, tl, idx, 0, 5, 8);
  CHECK(index_equal(idx, build_eps_index(ins, tl)));

  // Move job 4 across machines: [5,5] on machine 2 to [9,9] on machine 1.
  tl.machines[1].erase_at(5);
  REQUIRE(tl.machines[0].insert(3, 9, 1));
  update_eps(ins, tl, idx, 1, 5, 5);
  update_eps(ins, tl, idx, 0, 9, 9);
  CHECK(index_equal(idx, build_eps_index(ins, tl)));
}

TEST_CASE("the screening bound never prunes an improving swap") {
  Rng rng(90210);
  int pruned = 0, applied = 0, skipped = 0;
  for (int round = 0; round < 40; ++round) {
    GeneratorParams prm;
    prm.n = rng.uniform_int(2, 6);
    prm.m = rng.uniform_int(1, 2);
    prm.k = rng.uniform_int(6, 14);
    prm.p_max = std::min(4, prm.k);
    prm.seed = 60 + round;
    Instance ins = generate_instance(prm);
    auto maybe = test_support::random_schedule(ins, rng);
    if (!maybe) continue;
    FeasibleSchedule s = *maybe;
    Timelines tl = Timelines::from(ins, s);
    EpsIndex idx = build_eps_index(ins, tl);

    for (const auto& [len, jmap] : idx.job_windows) {
      auto iit = idx.idle_windows.find(len);
      if (iit == idx.idle_windows.end()) continue;
      for (const auto& [jk, job_win] : jmap) {
        (void)jk;
        for (const auto& [ik, idle_win] : iit->second) {
          (void)ik;
          if (job_win.machine == idle_win.machine &&
              !(job_win.end() < idle_win.start ||
                idle_win.end() < job_win.start))
            continue;
          EpsMoveResult r = evaluate_eps_move(ins, s, idle_win, job_win);
          EpsMoveResult forced =
              apply_eps_move_unchecked(ins, s, idle_win, job_win);
          Objectives before = evaluate(ins, s);
          Objectives after = evaluate(ins, forced.schedule);
          CHECK(after.tec - before.tec ==
                doctest::Approx(forced.delta).epsilon(1e-9).scale(1.0));
          switch (r.outcome) {
            case EpsMoveOutcome::PrunedByBound:
              ++pruned;
              CHECK(forced.delta >= -2e-9);
              break;
            case EpsMoveOutcome::SkippedMakespan:
              ++skipped;
              CHECK(after.makespan > before.makespan);
              break;
            case EpsMoveOutcome::Applied:
              ++applied;
              CHECK(after.makespan <= before.makespan);
              CHECK(r.delta == doctest::Approx(forced.delta));
              CHECK(classify(ins, r.schedule.to_schedule(ins)).cls ==
                    ScheduleClass::Feasible);
              break;
          }
        }
      }
    }
  }
  // The sweep must have exercised every branch to mean anything.
  CHECK(pruned > 0);
  CHECK(applied > 0);
  CHECK(skipped > 0);
}

TEST_CASE("exchange search finds the single improving swap of the demo") {
  Instance ins = swap_demo_instance();
  FeasibleSchedule s = swap_demo_schedule();
  ExchangeStats stats;
  ExchangeOptions opt;
  opt.verify_index = true;
  FeasibleSchedule out = exchange_search(ins, s, &stats, opt);

  Objectives o = evaluate(ins, out);
  CHECK(o.tec == doctest::Approx(15.0));
  CHECK(o.makespan == 8);
  CHECK(stats.accepted_moves == 1);
  CHECK(stats.sweeps == 2); // one improving sweep, one to confirm fixpoint
  CHECK_FALSE(stats.hit_sweep_cap);

  // Idempotent: a second pass has nothing left to do.
  ExchangeStats again;
  FeasibleSchedule out2 = exchange_search(ins, out, &again, opt);
  CHECK(again.accepted_moves == 0);
  CHECK(evaluate(ins, out2).tec == doctest::Approx(15.0));
}

TEST_CASE("exchange search rejects broken input schedules") {
  Instance ins = make_instance(2, 1, 4, {2, 1}, {1.0}, {1, 1, 1, 1});
  FeasibleSchedule overlapping;
  overlapping.jobs = {{0, 1}, {0, 2}}; // slot 2 claimed twice
  CHECK_THROWS_AS(exchange_search(ins, overlapping), std::invalid_argument);

  FeasibleSchedule out_of_range;
  out_of_range.jobs = {{0, 4}, {0, 1}}; // the length-2 job leaves the horizon
  CHECK_THROWS_AS(exchange_search(ins, out_of_range), std::invalid_argument);
}

TEST_CASE("exchange search never worsens either objective") {
  Rng rng(64);
  int runs = 0;
  for (int round = 0; round < 30; ++round) {
    GeneratorParams prm;
    prm.n = rng.uniform_int(3, 9);
    prm.m = rng.uniform_int(1, 3);
    prm.k = rng.uniform_int(6, 16);
    prm.p_max = std::min(5, prm.k);
    prm.seed = 900 + round;
    Instance ins = generate_instance(prm);
    Rng srng(round);
    auto s = sgh(ins, srng);
    if (!s) continue;
    ++runs;
    ExchangeStats stats;
    ExchangeOptions opt;
    opt.verify_index = true;
    FeasibleSchedule out = exchange_search(ins, *s, &stats, opt);
    Objectives before = evaluate(ins, *s);
    Objectives after = evaluate(ins, out);
    CHECK(after.makespan <= before.makespan);
    CHECK(after.tec <= before.tec + kTecTolerance);
    CHECK(classify(ins, out.to_schedule(ins)).cls == ScheduleClass::Feasible);
  }
  CHECK(runs >= 20);
}
