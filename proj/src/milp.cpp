#include "bpmstp/milp.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace bpmstp {

int MilpModel::find_var(const std::string& name) const {
  for (int i = 0; i < (int)vars.size(); ++i)
    if (vars[i].name == name) return i;
  return -1;
}

namespace {

struct Builder {
  MilpModel m;

  int add_var(std::string name, VarType type, double lb, double ub,
              std::array<int, 3> key = {-1, -1, -1}) {
    m.vars.push_back({std::move(name), type, lb, ub});
    m.start_keys.push_back(key);
    return (int)m.vars.size() - 1;
  }

  void add_row(std::string name, std::vector<LinTerm> terms, RowSense sense,
               double rhs) {
    m.rows.push_back({std::move(name), std::move(terms), sense, rhs});
  }
};

} // namespace

MilpModel build_f1(const Instance& ins, int horizon, bool reduced) {
  ins.validate();
  if (horizon < 1 || horizon > ins.n_slots)
    throw std::invalid_argument("build_f1: bad horizon");
  const int N = ins.n_jobs, M = ins.n_machines, K = horizon;

  Builder b;
  b.m.family = "job-start";
  b.m.horizon = K;
  b.m.reduced = reduced;

  // var_of(j, h, t): starts are declared for every slot; a start that cannot
  // finish inside the horizon is pinned to zero via its upper bound.
  auto idx = [&](int j, int h, int t) { return ((j * M) + h) * K + (t - 1); };
  for (int j = 0; j < N; ++j)
    for (int h = 0; h < M; ++h)
      for (int t = 1; t <= K; ++t) {
        bool usable = t + ins.processing_times[j] - 1 <= K;
        b.add_var("x_" + std::to_string(j + 1) + "_" + std::to_string(h + 1) +
                      "_" + std::to_string(t),
                  VarType::Binary, 0.0, usable ? 1.0 : 0.0, {j, h, t});
      }
  b.m.cmax_var = b.add_var("Cmax", VarType::Continuous, 0.0, (double)K);
  b.m.e_var = b.add_var("E", VarType::Continuous, 0.0,
                        std::numeric_limits<double>::infinity());

  DerivedData d = derive(ins, K);

  // Energy definition: E equals the summed price of every chosen start.
  {
    std::vector<LinTerm> terms;
    terms.push_back({b.m.e_var, 1.0});
    for (int j = 0; j < N; ++j) {
      int p = ins.processing_times[j];
      for (int h = 0; h < M; ++h)
        for (int t = 1; t + p - 1 <= K; ++t)
          terms.push_back({idx(j, h, t), -ins.consumption_rates[h] *
                                             d.window_cost[p][t - 1]});
    }
    b.add_row("energy_def", std::move(terms), RowSense::EQ, 0.0);
  }

  // Each job starts exactly once.
  for (int j = 0; j < N; ++j) {
    int p = ins.processing_times[j];
    std::vector<LinTerm> terms;
    for (int h = 0; h < M; ++h)
      for (int t = 1; t + p - 1 <= K; ++t) terms.push_back({idx(j, h, t), 1.0});
    b.add_row("start_once_j" + std::to_string(j + 1), std::move(terms),
              RowSense::EQ, 1.0);
  }

  // At most one job runs on machine h in slot t: any job whose start lies in
  // the window (t - p_j + 1 .. t] covers slot t.
  for (int h = 0; h < M; ++h)
    for (int t = 1; t <= K; ++t) {
      std::vector<LinTerm> terms;
      for (int j = 0; j < N; ++j)
        for (int i = std::max(1, t - ins.processing_times[j] + 1); i <= t; ++i)
          terms.push_back({idx(j, h, i), 1.0});
      b.add_row("cap_h" + std::to_string(h + 1) + "_t" + std::to_string(t),
                std::move(terms), RowSense::LE, 1.0);
    }

  if (!reduced) {
    // Every completion is at most Cmax, and Cmax stays inside the horizon.
    for (int j = 0; j < N; ++j) {
      int p = ins.processing_times[j];
      std::vector<LinTerm> terms;
      for (int h = 0; h < M; ++h)
        for (int t = 1; t + p - 1 <= K; ++t)
          terms.push_back({idx(j, h, t), (double)(t + p - 1)});
      terms.push_back({b.m.cmax_var, -1.0});
      b.add_row("finish_j" + std::to_string(j + 1), std::move(terms),
                RowSense::LE, 0.0);
    }
    b.add_row("horizon", {{b.m.cmax_var, 1.0}}, RowSense::LE, (double)K);
  }

  b.m.objective = {{b.m.e_var, 1.0}};
  return std::move(b.m);
}

MilpModel build_f2(const Instance& ins, int horizon, bool reduced) {
  ins.validate();
  if (horizon < 1 || horizon > ins.n_slots)
    throw std::invalid_argument("build_f2: bad horizon");
  const int M = ins.n_machines, K = horizon;

  DerivedData d = derive(ins, K);
  // Declaration (and branching) order: longest length first.
  std::vector<int> lens(d.distinct_ptimes.rbegin(), d.distinct_ptimes.rend());

  Builder b;
  b.m.family = "ptime-start";
  b.m.horizon = K;
  b.m.reduced = reduced;

  std::map<int, int> base; // length -> first var index of its (h, t) block
  for (int len : lens) {
    base[len] = (int)b.m.vars.size();
    for (int h = 0; h < M; ++h)
      for (int t = 1; t <= K; ++t) {
        bool usable = t + len - 1 <= K;
        b.add_var("y_" + std::to_string(len) + "_" + std::to_string(h + 1) +
                      "_" + std::to_string(t),
                  VarType::Binary, 0.0, usable ? 1.0 : 0.0, {len, h, t});
      }
  }
  auto idx = [&](int len, int h, int t) { return base[len] + h * K + (t - 1); };
  b.m.cmax_var = b.add_var("Cmax", VarType::Continuous, 0.0, (double)K);
  b.m.e_var = b.add_var("E", VarType::Continuous, 0.0,
                        std::numeric_limits<double>::infinity());

  {
    std::vector<LinTerm> terms;
    terms.push_back({b.m.e_var, 1.0});
    for (int len : lens)
      for (int h = 0; h < M; ++h)
        for (int t = 1; t + len - 1 <= K; ++t)
          terms.push_back({idx(len, h, t), -ins.consumption_rates[h] *
                                               d.window_cost[len][t - 1]});
    b.add_row("energy_def", std::move(terms), RowSense::EQ, 0.0);
  }

  // Exactly |J_d| starts of each length.
  for (int len : lens) {
    std::vector<LinTerm> terms;
    for (int h = 0; h < M; ++h)
      for (int t = 1; t + len - 1 <= K; ++t) terms.push_back({idx(len, h, t), 1.0});
    b.add_row("count_d" + std::to_string(len), std::move(terms), RowSense::EQ,
              (double)d.jobs_by_ptime[len].size());
  }

  // Slot capacity.
  for (int h = 0; h < M; ++h)
    for (int t = 1; t <= K; ++t) {
      std::vector<LinTerm> terms;
      for (int len : lens)
        for (int i = std::max(1, t - len + 1); i <= t; ++i)
          terms.push_back({idx(len, h, i), 1.0});
      b.add_row("cap_h" + std::to_string(h + 1) + "_t" + std::to_string(t),
                std::move(terms), RowSense::LE, 1.0);
    }

  if (!reduced) {
    // One completion bound per usable start variable.
    for (int len : lens)
      for (int h = 0; h < M; ++h)
        for (int t = 1; t + len - 1 <= K; ++t)
          b.add_row("finish_d" + std::to_string(len) + "_h" +
                        std::to_string(h + 1) + "_t" + std::to_string(t),
                    {{idx(len, h, t), (double)(t + len - 1)},
                     {b.m.cmax_var, -1.0}},
                    RowSense::LE, 0.0);
    b.add_row("horizon", {{b.m.cmax_var, 1.0}}, RowSense::LE, (double)K);
  }

  b.m.objective = {{b.m.e_var, 1.0}};
  return std::move(b.m);
}

int distinct_ptime_bound(long long machines, long long slots) {
  long long cap = machines * slots;
  long long q = 0;
  while ((q + 1) * (q + 2) / 2 <= cap) ++q;
  return (int)q;
}

FeasibilityCheck necessary_feasibility(const Instance& ins, int horizon) {
  ins.validate();
  if (horizon < 1)
    throw std::invalid_argument("necessary_feasibility: bad horizon");
  FeasibilityCheck c;
  c.load = ins.total_load();
  c.capacity = (long long)ins.n_machines * horizon;
  std::set<int> distinct(ins.processing_times.begin(),
                         ins.processing_times.end());
  c.distinct = (int)distinct.size();
  c.distinct_limit = distinct_ptime_bound(ins.n_machines, horizon);
  if (c.load > c.capacity)
    c.status = FeasibilityCheck::Status::FailCapacity;
  else if (c.distinct > c.distinct_limit)
    c.status = FeasibilityCheck::Status::FailDistinct;
  return c;
}

FeasibleSchedule schedule_from_y(const Instance& ins, int horizon,
                                 const std::vector<std::array<int, 3>>& set_y) {
  ins.validate();
  if (horizon < 1 || horizon > ins.n_slots)
    throw std::invalid_argument("schedule_from_y: bad horizon");
  DerivedData d = derive(ins, horizon);

  std::map<int, std::vector<std::pair<int, int>>> starts; // len -> (h, t)
  for (const auto& [len, h, t] : set_y) {
    if (!d.jobs_by_ptime.count(len))
      throw std::invalid_argument("schedule_from_y: no job has length " +
                                  std::to_string(len));
    if (h < 0 || h >= ins.n_machines)
      throw std::invalid_argument("schedule_from_y: machine out of range");
    if (t < 1 || t + len - 1 > horizon)
      throw std::invalid_argument(
          "schedule_from_y: start " + std::to_string(t) + " of a length-" +
          std::to_string(len) + " job leaves the horizon");
    starts[len].push_back({h, t});
  }
  for (const auto& [len, jobs] : d.jobs_by_ptime) {
    std::size_t have = starts.count(len) ? starts[len].size() : 0;
    if (have != jobs.size())
      throw std::invalid_argument(
          "schedule_from_y: length " + std::to_string(len) + " needs " +
          std::to_string(jobs.size()) + " starts, got " + std::to_string(have));
  }

  FeasibleSchedule out;
  out.jobs.resize(ins.n_jobs);
  std::vector<std::vector<bool>> used(ins.n_machines,
                                      std::vector<bool>(horizon + 1, false));
  // Hand each length's starts out in (machine, slot) order to jobs in
  // ascending id order — any pairing yields the same objectives, this one is
  // reproducible.
  for (auto& [len, list] : starts) {
    std::sort(list.begin(), list.end());
    const auto& jobs = d.jobs_by_ptime[len];
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto [h, t] = list[i];
      for (int q = t; q < t + len; ++q) {
        if (used[h][q])
          throw std::invalid_argument(
              "schedule_from_y: machine " + std::to_string(h + 1) +
              " double-booked at slot " + std::to_string(q));
        used[h][q] = true;
      }
      out.jobs[jobs[i]] = {h, t};
    }
  }
  return out;
}

std::vector<std::array<int, 3>> warm_start_from_schedule(
    const Instance& ins, const FeasibleSchedule& s) {
  if ((int)s.jobs.size() != ins.n_jobs)
    throw std::invalid_argument("warm_start_from_schedule: wrong job count");
  std::vector<std::array<int, 3>> out;
  out.reserve(ins.n_jobs);
  for (int j = 0; j < ins.n_jobs; ++j)
    out.push_back({ins.processing_times[j], s.jobs[j].machine, s.jobs[j].start});
  return out;
}

} // namespace bpmstp
