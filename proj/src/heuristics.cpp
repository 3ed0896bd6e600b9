#include "bpmstp/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "bpmstp/eps.hpp"
#include "bpmstp/timeline.hpp"

namespace bpmstp {

FeasibleSchedule convert_schedule(const Instance& ins, const Schedule& s) {
  Classification c = classify(ins, s);
  if (c.cls == ScheduleClass::Invalid)
    throw std::invalid_argument(std::string("convert_schedule: invalid input (") +
                                to_string(c.reason) + ")");
  if (c.cls == ScheduleClass::PreemptiveNonSplit)
    throw std::invalid_argument(
        "convert_schedule: a fragmented job has idle slots in its gaps; "
        "in-place repair would change the objectives");

  FeasibleSchedule out;
  out.jobs.resize(ins.n_jobs);

  // Jobs grouped per machine, ordered by original first slot.
  std::vector<std::vector<std::pair<int, int>>> per_machine(ins.n_machines);
  for (int j = 0; j < ins.n_jobs; ++j)
    per_machine[s.jobs[j].machine].push_back({s.jobs[j].slots.front(), j});

  for (int h = 0; h < ins.n_machines; ++h) {
    auto& list = per_machine[h];
    std::sort(list.begin(), list.end());
    int k = 1; // next slot available for repacking
    for (auto [first_slot, j] : list) {
      int start = std::max(k, first_slot);
      int p = ins.processing_times[j];
      if (start + p - 1 > ins.n_slots)
        throw std::logic_error("convert_schedule: repack exceeded the horizon");
      out.jobs[j] = {h, start};
      k = start + p;
    }
  }
  return out;
}

namespace {

// All length-d free locations on one machine, kept as windows of d
// consecutive entries of the machine's current free-slot list (so a window
// may be fragmented; the slots between its entries are then occupied).
// Identified by their first slot; ordered by (cost, first slot).
struct LocationList {
  std::vector<int> free; // current free slots, ascending
  std::multiset<std::pair<double, int>> by_cost;
  std::unordered_map<int, double> cost_of; // first slot -> cost
  int len = 0;
  double rate = 0.0;
  const std::vector<double>* costs = nullptr; // instance slot costs

  double window_cost(int pos) const {
    double sum = 0.0;
    for (int k = 0; k < len; ++k) sum += (*costs)[free[pos + k] - 1];
    return rate * sum;
  }

  void build(std::vector<int> f, int d, double u,
             const std::vector<double>& slot_costs) {
    free = std::move(f);
    len = d;
    rate = u;
    costs = &slot_costs;
    by_cost.clear();
    cost_of.clear();
    for (int pos = 0; pos + len <= (int)free.size(); ++pos) add_window(pos);
  }

  void add_window(int pos) {
    double cst = window_cost(pos);
    by_cost.insert({cst, free[pos]});
    cost_of[free[pos]] = cst;
  }

  void drop_window_at_slot(int slot) {
    auto it = cost_of.find(slot);
    if (it == cost_of.end()) return;
    by_cost.erase(by_cost.find({it->second, slot}));
    cost_of.erase(it);
  }

  int pos_of_slot(int slot) const {
    return (int)(std::lower_bound(free.begin(), free.end(), slot) -
                 free.begin());
  }

  // Claims the window whose first slot is `slot`; returns its slot set and
  // refreshes the neighbouring windows (only they can have changed).
  std::vector<int> claim(int slot) {
    int pos = pos_of_slot(slot);
    std::vector<int> taken(free.begin() + pos, free.begin() + pos + len);
    int lo = std::max(0, pos - len + 1);
    int hi = std::min((int)free.size() - len, pos + len - 1);
    for (int q = lo; q <= hi; ++q) drop_window_at_slot(free[q]);
    free.erase(free.begin() + pos, free.begin() + pos + len);
    int hi2 = std::min(pos - 1, (int)free.size() - len);
    for (int q = lo; q <= hi2; ++q) add_window(q);
    return taken;
  }
};

} // namespace

std::optional<FeasibleSchedule> sgh(const Instance& ins, Rng& rng) {
  ins.validate();
  const int K = ins.n_slots, M = ins.n_machines;
  DerivedData d = derive(ins, K);

  std::vector<std::vector<int>> free_slots(M);
  for (int h = 0; h < M; ++h) {
    free_slots[h].resize(K);
    std::iota(free_slots[h].begin(), free_slots[h].end(), 1);
  }

  Schedule placed;
  placed.jobs.resize(ins.n_jobs);

  // Longest processing times first.
  for (auto it = d.distinct_ptimes.rbegin(); it != d.distinct_ptimes.rend();
       ++it) {
    int len = *it;
    std::vector<LocationList> lists(M);
    for (int h = 0; h < M; ++h)
      lists[h].build(std::move(free_slots[h]), len, ins.consumption_rates[h],
                     ins.slot_costs);

    for (int j : d.jobs_by_ptime[len]) {
      double best = std::numeric_limits<double>::infinity();
      for (int h = 0; h < M; ++h)
        if (!lists[h].by_cost.empty())
          best = std::min(best, lists[h].by_cost.begin()->first);
      if (!std::isfinite(best)) return std::nullopt; // no room anywhere

      // Uniform pick among every location tied at the global minimum.
      std::vector<std::pair<int, int>> ties; // (machine, first slot)
      for (int h = 0; h < M; ++h)
        for (auto itc = lists[h].by_cost.begin();
             itc != lists[h].by_cost.end() && itc->first == best; ++itc)
          ties.push_back({h, itc->second});
      auto [mh, mslot] = ties[rng.pick_index(ties.size())];

      placed.jobs[j].machine = mh;
      placed.jobs[j].slots = lists[mh].claim(mslot);
    }

    for (int h = 0; h < M; ++h) free_slots[h] = std::move(lists[h].free);
  }

  return convert_schedule(ins, placed);
}

namespace {

Front level_scan(const Instance& ins, std::uint64_t seed, bool with_exchange) {
  ins.validate();
  Rng rng(seed);
  int k_low = lower_bound_makespan(ins);
  std::vector<FrontPoint> pts;
  for (int kh = ins.n_slots; kh >= k_low; --kh) {
    Instance level = downsize(ins, kh);
    auto s = sgh(level, rng);
    if (!s) break; // the scan stops at the first level the greedy cannot fill
    FeasibleSchedule fs = *s;
    if (with_exchange) fs = exchange_search(level, fs);
    pts.push_back({evaluate(level, fs), fs, true, 0});
  }
  return pareto_filter(std::move(pts));
}

} // namespace

Front sgs(const Instance& ins, std::uint64_t seed) {
  return level_scan(ins, seed, false);
}

Front sgs_es(const Instance& ins, std::uint64_t seed) {
  return level_scan(ins, seed, true);
}

namespace {

// One shift move: slide a whole maximal run of adjacent jobs left or right
// into its idle margin. Applied first-improvement until fixpoint; the global
// makespan is never allowed to grow.
void block_shift_search(const Instance& ins, Timelines& tl, int horizon) {
  std::vector<double> pref(horizon + 1, 0.0);
  for (int t = 1; t <= horizon; ++t) pref[t] = pref[t - 1] + ins.slot_costs[t - 1];
  auto span_price = [&](int h, int a, int b) {
    return ins.consumption_rates[h] * (pref[b] - pref[a - 1]);
  };

  bool improved = true;
  while (improved) {
    improved = false;
    int cur_mk = tl.makespan();
    for (int h = 0; h < ins.n_machines && !improved; ++h) {
      // Maximal runs of adjacent entries on machine h.
      std::vector<std::pair<int, int>> blocks;
      for (const auto& [st, e] : tl.machines[h].entries()) {
        (void)st;
        if (!blocks.empty() && blocks.back().second + 1 == e.start)
          blocks.back().second = e.end;
        else
          blocks.push_back({e.start, e.end});
      }
      int mk_other = 0;
      for (int h2 = 0; h2 < ins.n_machines; ++h2)
        if (h2 != h) mk_other = std::max(mk_other, tl.machines[h2].last_assigned());

      for (std::size_t b = 0; b < blocks.size() && !improved; ++b) {
        auto [ba, bb] = blocks[b];
        int left = (b == 0) ? 1 : blocks[b - 1].second + 1;
        int right = (b + 1 < blocks.size()) ? blocks[b + 1].first - 1 : horizon;
        double base = span_price(h, ba, bb);
        int machine_last = tl.machines[h].last_assigned();
        for (int delta = left - ba; delta <= right - bb; ++delta) {
          if (delta == 0) continue;
          if (delta > 0) {
            int machine_mk =
                (bb == machine_last) ? bb + delta : machine_last;
            if (std::max(mk_other, machine_mk) > cur_mk) break; // larger deltas only worse
          }
          if (span_price(h, ba + delta, bb + delta) < base - kTecTolerance) {
            auto moved = tl.machines[h].entries_starting_in(ba, bb);
            for (const auto& e : moved) tl.machines[h].erase_at(e.start);
            for (const auto& e : moved)
              tl.machines[h].insert(e.job, e.start + delta,
                                    e.end - e.start + 1);
            improved = true;
            break;
          }
        }
      }
    }
  }
}

} // namespace

Front ch_j(const Instance& ins, std::uint64_t seed) {
  ins.validate();
  Rng rng(seed);

  // Longest-first order; ties between equal processing times are shuffled.
  std::vector<int> order(ins.n_jobs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ins.processing_times[a] > ins.processing_times[b];
  });
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && ins.processing_times[order[j]] ==
                                   ins.processing_times[order[i]])
      ++j;
    if (j - i > 1) {
      std::vector<int> run(order.begin() + i, order.begin() + j);
      rng.shuffle(run);
      std::copy(run.begin(), run.end(), order.begin() + i);
    }
    i = j;
  }

  std::vector<double> pref(ins.n_slots + 1, 0.0);
  for (int t = 1; t <= ins.n_slots; ++t)
    pref[t] = pref[t - 1] + ins.slot_costs[t - 1];

  int k_low = lower_bound_makespan(ins);
  std::vector<FrontPoint> pts;
  int kh = ins.n_slots;
  while (kh >= k_low) {
    Timelines tl;
    tl.machines.assign(ins.n_machines, MachineTimeline(kh));
    bool ok = true;
    for (int j : order) {
      int p = ins.processing_times[j];
      double best = std::numeric_limits<double>::infinity();
      int best_h = -1, best_s = 0;
      for (int h = 0; h < ins.n_machines; ++h) {
        int t = 1;
        while (t + p - 1 <= kh) { // adjacent-only placements
          const TimelineEntry* occ = tl.machines[h].occupant(t);
          if (occ) {
            t = occ->end + 1;
            continue;
          }
          const TimelineEntry* nxt = tl.machines[h].first_starting_at_or_after(t);
          int run_end = nxt ? nxt->start - 1 : kh;
          for (int s = t; s + p - 1 <= run_end && s + p - 1 <= kh; ++s) {
            double cost =
                ins.consumption_rates[h] * (pref[s + p - 1] - pref[s - 1]);
            if (cost < best ||
                (cost == best && (s < best_s || (s == best_s && h < best_h)))) {
              best = cost;
              best_h = h;
              best_s = s;
            }
          }
          t = run_end + 1;
        }
      }
      if (best_h < 0) {
        ok = false; // job j cannot be placed at this level: emit nothing
        break;
      }
      tl.machines[best_h].insert(j, best_s, p);
    }
    if (!ok) {
      --kh;
      continue;
    }
    block_shift_search(ins, tl, kh);
    FeasibleSchedule fs = tl.to_feasible(ins);
    Objectives obj = evaluate(ins, fs);
    pts.push_back({obj, fs, true, 0});
    kh = obj.makespan - 1;
  }
  return pareto_filter(std::move(pts));
}

} // namespace bpmstp
