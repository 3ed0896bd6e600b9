#include "bpmstp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bpmstp {

long long Instance::total_load() const {
  return std::accumulate(processing_times.begin(), processing_times.end(),
                         0LL);
}

void Instance::validate() const {
  if (n_jobs <= 0) throw std::invalid_argument("instance: n_jobs must be >= 1");
  if (n_machines <= 0)
    throw std::invalid_argument("instance: n_machines must be >= 1");
  if (n_slots <= 0) throw std::invalid_argument("instance: n_slots must be >= 1");
  if ((int)processing_times.size() != n_jobs)
    throw std::invalid_argument("instance: expected " + std::to_string(n_jobs) +
                                " processing times, got " +
                                std::to_string(processing_times.size()));
  if ((int)consumption_rates.size() != n_machines)
    throw std::invalid_argument(
        "instance: expected " + std::to_string(n_machines) +
        " consumption rates, got " + std::to_string(consumption_rates.size()));
  if ((int)slot_costs.size() != n_slots)
    throw std::invalid_argument("instance: expected " + std::to_string(n_slots) +
                                " slot costs, got " +
                                std::to_string(slot_costs.size()));
  for (int j = 0; j < n_jobs; ++j) {
    int p = processing_times[j];
    if (p < 1 || p > n_slots)
      throw std::invalid_argument("instance: processing time of job " +
                                  std::to_string(j + 1) + " (" +
                                  std::to_string(p) + ") outside [1, " +
                                  std::to_string(n_slots) + "]");
  }
  for (int h = 0; h < n_machines; ++h) {
    double u = consumption_rates[h];
    if (!(u >= 0.0) || !std::isfinite(u))
      throw std::invalid_argument("instance: consumption rate of machine " +
                                  std::to_string(h + 1) +
                                  " must be finite and >= 0");
  }
  for (int t = 0; t < n_slots; ++t) {
    double c = slot_costs[t];
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("instance: cost of slot " +
                                  std::to_string(t + 1) +
                                  " must be finite and >= 0");
  }
}

Instance downsize(const Instance& ins, int horizon) {
  if (horizon < 1 || horizon > ins.n_slots)
    throw std::invalid_argument("downsize: horizon " + std::to_string(horizon) +
                                " outside [1, " + std::to_string(ins.n_slots) +
                                "]");
  Instance out = ins;
  out.n_slots = horizon;
  out.slot_costs.resize(horizon);
  return out;
}

Schedule FeasibleSchedule::to_schedule(const Instance& ins) const {
  Schedule out;
  out.jobs.resize(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    out.jobs[j].machine = jobs[j].machine;
    if (jobs[j].machine < 0) continue;
    int p = (j < (std::size_t)ins.n_jobs) ? ins.processing_times[j] : 0;
    out.jobs[j].slots.resize(p);
    std::iota(out.jobs[j].slots.begin(), out.jobs[j].slots.end(),
              jobs[j].start);
  }
  return out;
}

const char* to_string(ScheduleClass c) {
  switch (c) {
    case ScheduleClass::Feasible: return "feasible";
    case ScheduleClass::Split: return "split";
    case ScheduleClass::PreemptiveNonSplit: return "preemptive-non-split";
    case ScheduleClass::Invalid: return "invalid";
  }
  return "?";
}

const char* to_string(InvalidReason r) {
  switch (r) {
    case InvalidReason::None: return "none";
    case InvalidReason::Overlap: return "overlap";
    case InvalidReason::MissingJob: return "missing job";
    case InvalidReason::OutOfRangeSlot: return "out-of-range slot";
    case InvalidReason::WrongCardinality: return "wrong cardinality";
  }
  return "?";
}

bool same_point(const Objectives& a, const Objectives& b) {
  return a.makespan == b.makespan && std::fabs(a.tec - b.tec) <= kTecTolerance;
}

Classification classify(const Instance& ins, const Schedule& s) {
  if ((int)s.jobs.size() != ins.n_jobs)
    return {ScheduleClass::Invalid, InvalidReason::MissingJob};

  for (int j = 0; j < ins.n_jobs; ++j) {
    const auto& a = s.jobs[j];
    if (a.machine < 0 || a.slots.empty())
      return {ScheduleClass::Invalid, InvalidReason::MissingJob};
    if (a.machine >= ins.n_machines)
      return {ScheduleClass::Invalid, InvalidReason::OutOfRangeSlot};
    for (std::size_t i = 0; i < a.slots.size(); ++i) {
      if (a.slots[i] < 1 || a.slots[i] > ins.n_slots)
        return {ScheduleClass::Invalid, InvalidReason::OutOfRangeSlot};
      if (i > 0 && a.slots[i] <= a.slots[i - 1])
        return {ScheduleClass::Invalid, InvalidReason::WrongCardinality};
    }
    if ((int)a.slots.size() != ins.processing_times[j])
      return {ScheduleClass::Invalid, InvalidReason::WrongCardinality};
  }

  // Per-machine occupancy; -1 = idle, else owning job.
  std::vector<std::vector<int>> occ(
      ins.n_machines, std::vector<int>(ins.n_slots + 1, -1));
  for (int j = 0; j < ins.n_jobs; ++j) {
    const auto& a = s.jobs[j];
    for (int t : a.slots) {
      if (occ[a.machine][t] != -1)
        return {ScheduleClass::Invalid, InvalidReason::Overlap};
      occ[a.machine][t] = j;
    }
  }

  bool any_split = false;
  for (int j = 0; j < ins.n_jobs; ++j) {
    const auto& a = s.jobs[j];
    int first = a.slots.front(), last = a.slots.back();
    if (last - first + 1 == (int)a.slots.size()) continue; // adjacent run
    any_split = true;
    // A fragmented job is repairable only if every slot inside its span that
    // it does not occupy is occupied by some other job on the same machine.
    for (int t = first; t <= last; ++t)
      if (occ[a.machine][t] == -1)
        return {ScheduleClass::PreemptiveNonSplit, InvalidReason::None};
  }
  return {any_split ? ScheduleClass::Split : ScheduleClass::Feasible,
          InvalidReason::None};
}

Objectives evaluate(const Instance& ins, const Schedule& s) {
  Classification c = classify(ins, s);
  if (c.cls == ScheduleClass::Invalid)
    throw std::invalid_argument(std::string("evaluate: invalid schedule (") +
                                to_string(c.reason) + ")");
  Objectives o;
  for (int j = 0; j < ins.n_jobs; ++j) {
    const auto& a = s.jobs[j];
    o.makespan = std::max(o.makespan, a.slots.back());
    double sum = 0.0;
    for (int t : a.slots) sum += ins.slot_costs[t - 1];
    o.tec += ins.consumption_rates[a.machine] * sum;
  }
  return o;
}

Objectives evaluate(const Instance& ins, const FeasibleSchedule& s) {
  return evaluate(ins, s.to_schedule(ins));
}

DerivedData derive(const Instance& ins, int horizon) {
  ins.validate();
  if (horizon < 1 || horizon > ins.n_slots)
    throw std::invalid_argument("derive: horizon " + std::to_string(horizon) +
                                " outside [1, " + std::to_string(ins.n_slots) +
                                "]");
  DerivedData d;
  d.horizon = horizon;
  for (int j = 0; j < ins.n_jobs; ++j)
    d.jobs_by_ptime[ins.processing_times[j]].push_back(j);
  for (const auto& [p, jobs] : d.jobs_by_ptime) {
    (void)jobs;
    d.distinct_ptimes.push_back(p);
    d.p_max = std::max(d.p_max, p);
  }
  for (int p : d.distinct_ptimes) {
    int count = horizon - p + 1;
    std::vector<double> w;
    if (count > 0) {
      w.resize(count);
      double run = 0.0;
      for (int t = 0; t < p; ++t) run += ins.slot_costs[t];
      w[0] = run;
      for (int t = 1; t < count; ++t) {
        run += ins.slot_costs[t + p - 1] - ins.slot_costs[t - 1];
        w[t] = run;
      }
    }
    d.window_cost[p] = std::move(w);
  }
  d.cum_price.assign(ins.n_machines, std::vector<double>(horizon + 1, 0.0));
  for (int h = 0; h < ins.n_machines; ++h)
    for (int t = 1; t <= horizon; ++t)
      d.cum_price[h][t] =
          d.cum_price[h][t - 1] + ins.consumption_rates[h] * ins.slot_costs[t - 1];
  d.k_lower = lower_bound_makespan(ins);
  d.omega = std::min(ins.n_jobs, horizon);
  return d;
}

int lower_bound_makespan(const Instance& ins) {
  if (ins.n_machines <= 0)
    throw std::invalid_argument("lower_bound_makespan: no machines");
  long long by_load = ins.total_load() / ins.n_machines; // floor
  long long longest = 0;
  for (int p : ins.processing_times) longest = std::max<long long>(longest, p);
  return (int)std::max(by_load, longest);
}

Front pareto_filter(std::vector<FrontPoint> pts) {
  std::stable_sort(pts.begin(), pts.end(),
                   [](const FrontPoint& a, const FrontPoint& b) {
                     if (a.obj.makespan != b.obj.makespan)
                       return a.obj.makespan < b.obj.makespan;
                     return a.obj.tec < b.obj.tec;
                   });
  Front f;
  double best_tec = 0.0;
  bool have = false;
  for (auto& p : pts) {
    // Sorted by makespan, so an earlier point dominates this one exactly when
    // its tec is not worse (within tolerance).
    if (have && p.obj.tec >= best_tec - kTecTolerance) continue;
    best_tec = p.obj.tec;
    have = true;
    f.points.push_back(std::move(p));
  }
  return f;
}

} // namespace bpmstp
