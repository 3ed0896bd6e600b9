#include "bpmstp/timeline.hpp"

#include <algorithm>

namespace bpmstp {

bool MachineTimeline::insert(int job, int start, int len) {
  if (len < 1 || start < 1 || start + len - 1 > horizon_) return false;
  int end = start + len - 1;
  auto nxt = by_start_.lower_bound(start);
  if (nxt != by_start_.end() && nxt->second.start <= end) return false;
  if (nxt != by_start_.begin()) {
    auto prv = std::prev(nxt);
    if (prv->second.end >= start) return false;
  }
  by_start_[start] = TimelineEntry{job, start, end};
  return true;
}

void MachineTimeline::erase_at(int start) { by_start_.erase(start); }

const TimelineEntry* MachineTimeline::occupant(int t) const {
  auto it = by_start_.upper_bound(t);
  if (it == by_start_.begin()) return nullptr;
  --it;
  return (it->second.end >= t) ? &it->second : nullptr;
}

const TimelineEntry* MachineTimeline::first_starting_at_or_after(int t) const {
  auto it = by_start_.lower_bound(t);
  return (it == by_start_.end()) ? nullptr : &it->second;
}

int MachineTimeline::last_assigned() const {
  return by_start_.empty() ? 0 : by_start_.rbegin()->second.end;
}

std::vector<int> MachineTimeline::free_slots(int lo, int hi) const {
  std::vector<int> out;
  lo = std::max(lo, 1);
  hi = std::min(hi, horizon_);
  int t = lo;
  while (t <= hi) {
    const TimelineEntry* e = occupant(t);
    if (e) {
      t = e->end + 1;
      continue;
    }
    const TimelineEntry* nxt = first_starting_at_or_after(t);
    int run_end = std::min(hi, nxt ? nxt->start - 1 : hi);
    for (; t <= run_end; ++t) out.push_back(t);
  }
  return out;
}

std::vector<TimelineEntry> MachineTimeline::entries_starting_in(int lo,
                                                                int hi) const {
  std::vector<TimelineEntry> out;
  for (auto it = by_start_.lower_bound(lo);
       it != by_start_.end() && it->first <= hi; ++it)
    out.push_back(it->second);
  return out;
}

Timelines Timelines::from(const Instance& ins, const FeasibleSchedule& s) {
  if ((int)s.jobs.size() != ins.n_jobs)
    throw std::invalid_argument("timelines: schedule covers " +
                                std::to_string(s.jobs.size()) + " jobs, not " +
                                std::to_string(ins.n_jobs));
  Timelines t;
  t.machines.assign(ins.n_machines, MachineTimeline(ins.n_slots));
  for (int j = 0; j < ins.n_jobs; ++j) {
    const auto& pl = s.jobs[j];
    if (pl.machine < 0 || pl.machine >= ins.n_machines)
      throw std::invalid_argument("timelines: job " + std::to_string(j + 1) +
                                  " has no machine");
    if (!t.machines[pl.machine].insert(j, pl.start, ins.processing_times[j]))
      throw std::invalid_argument("timelines: job " + std::to_string(j + 1) +
                                  " overlaps or exceeds the horizon");
  }
  return t;
}

FeasibleSchedule Timelines::to_feasible(const Instance& ins) const {
  FeasibleSchedule s;
  s.jobs.resize(ins.n_jobs);
  for (int h = 0; h < (int)machines.size(); ++h)
    for (const auto& [start, e] : machines[h].entries()) {
      (void)start;
      s.jobs[e.job] = {h, e.start};
    }
  return s;
}

int Timelines::makespan() const {
  int mk = 0;
  for (const auto& m : machines) mk = std::max(mk, m.last_assigned());
  return mk;
}

} // namespace bpmstp
