#include "bpmstp/eps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bpmstp/heuristics.hpp"

namespace bpmstp {

namespace {

std::vector<int> distinct_ptimes(const Instance& ins) {
  std::set<int> s(ins.processing_times.begin(), ins.processing_times.end());
  return std::vector<int>(s.begin(), s.end());
}

} // namespace

void find_eps(const Instance& ins, const Timelines& tl,
              const std::vector<int>& machines, int lo, int hi,
              const std::vector<int>& lengths, std::vector<EpsRecord>* out_job,
              std::vector<EpsRecord>* out_idle) {
  const int horizon = ins.n_slots;
  lo = std::max(lo, 1);
  hi = std::min(hi, horizon);

  for (int h : machines) {
    const MachineTimeline& m = tl.machines.at(h);
    const double rate = ins.consumption_rates[h];
    // Machine-local price prefix: price of [a, b] is pref[b] - pref[a-1].
    std::vector<double> pref(horizon + 1, 0.0);
    for (int t = 1; t <= horizon; ++t)
      pref[t] = pref[t - 1] + rate * ins.slot_costs[t - 1];

    for (int len : lengths) {
      int s = lo;
      while (s + len - 1 <= hi) {
        int e = s + len - 1;
        const TimelineEntry* occ_s = m.occupant(s);
        const TimelineEntry* occ_e = m.occupant(e);
        // The window is exchangeable exactly when no job crosses either
        // boundary; a job that overlaps it then lies wholly inside.
        bool clean = (!occ_s || occ_s->start == s) && (!occ_e || occ_e->end == e);
        if (clean) {
          auto members = m.entries_starting_in(s, e);
          int alpha = 0;
          for (const auto& en : members) alpha += en.end - en.start + 1;

          bool is_job = members.size() == 1 && alpha == len;
          bool is_idle = alpha < len;
          if (is_job || is_idle) {
            EpsRecord r;
            r.machine = h;
            r.start = s;
            r.length = len;
            r.kind = is_job ? EpsKind::JobOnly : EpsKind::Idle;
            r.assigned_count = alpha;
            for (const auto& en : members) {
              r.member_jobs.push_back(en.job);
              r.sub_tec += pref[en.end] - pref[en.start - 1];
            }
            std::vector<double> slot_prices(len);
            for (int t = 0; t < len; ++t)
              slot_prices[t] = rate * ins.slot_costs[s + t - 1];
            std::sort(slot_prices.begin(), slot_prices.end());
            r.sorted_prefix.resize(len + 1, 0.0);
            for (int n = 1; n <= len; ++n)
              r.sorted_prefix[n] = r.sorted_prefix[n - 1] + slot_prices[n - 1];
            r.window_sum = r.sorted_prefix[len];
            (is_job ? out_job : out_idle)->push_back(std::move(r));
          }
        }
        // Jump over a job starting here; nothing strictly inside a job can
        // open an exchangeable window.
        if (occ_s && occ_s->start == s)
          s += occ_s->end - occ_s->start + 1;
        else
          s += 1;
      }
    }
  }
}

EpsIndex build_eps_index(const Instance& ins, const Timelines& tl) {
  EpsIndex idx;
  idx.horizon = ins.n_slots;
  std::vector<int> machines(ins.n_machines);
  for (int h = 0; h < ins.n_machines; ++h) machines[h] = h;
  std::vector<EpsRecord> jobs, idles;
  find_eps(ins, tl, machines, 1, ins.n_slots, distinct_ptimes(ins), &jobs,
           &idles);
  for (auto& r : jobs)
    idx.job_windows[r.length][eps_key(idx.horizon, r.machine, r.start)] =
        std::move(r);
  for (auto& r : idles)
    idx.idle_windows[r.length][eps_key(idx.horizon, r.machine, r.start)] =
        std::move(r);
  return idx;
}

void update_eps(const Instance& ins, const Timelines& tl, EpsIndex& index,
                int machine, int lo, int hi) {
  const int horizon = index.horizon;
  lo = std::max(lo, 1);
  hi = std::min(hi, horizon);
  for (int len : distinct_ptimes(ins)) {
    // Starts of length-`len` windows intersecting [lo, hi].
    int first = std::max(1, lo - len + 1);
    int last = std::min(horizon - len + 1, hi);
    auto scrub = [&](std::map<long long, EpsRecord>& m) {
      m.erase(m.lower_bound(eps_key(horizon, machine, first)),
              m.upper_bound(eps_key(horizon, machine, last)));
    };
    scrub(index.job_windows[len]);
    scrub(index.idle_windows[len]);
    if (first > last) continue;

    std::vector<EpsRecord> jobs, idles;
    find_eps(ins, tl, {machine}, first, std::min(horizon, hi + len - 1), {len},
             &jobs, &idles);
    for (auto& r : jobs)
      index.job_windows[len][eps_key(horizon, r.machine, r.start)] =
          std::move(r);
    for (auto& r : idles)
      index.idle_windows[len][eps_key(horizon, r.machine, r.start)] =
          std::move(r);
  }
}

namespace {

void check_move_preconditions(const Instance& ins, const FeasibleSchedule& s,
                              const EpsRecord& idle_win,
                              const EpsRecord& job_win) {
  if (job_win.kind != EpsKind::JobOnly || idle_win.kind != EpsKind::Idle)
    throw std::invalid_argument("eps move: wrong window kinds");
  if (job_win.length != idle_win.length)
    throw std::invalid_argument("eps move: window lengths differ");
  if (job_win.machine == idle_win.machine &&
      !(job_win.end() < idle_win.start || idle_win.end() < job_win.start))
    throw std::invalid_argument("eps move: windows overlap");
  if (job_win.member_jobs.size() != 1)
    throw std::invalid_argument("eps move: source window must hold one job");
  int j = job_win.member_jobs[0];
  if (j < 0 || j >= ins.n_jobs ||
      s.jobs[j].machine != job_win.machine ||
      s.jobs[j].start != job_win.start ||
      ins.processing_times[j] != job_win.length)
    throw std::invalid_argument("eps move: source record does not match the schedule");
  for (int mj : idle_win.member_jobs) {
    if (mj < 0 || mj >= ins.n_jobs || s.jobs[mj].machine != idle_win.machine ||
        s.jobs[mj].start < idle_win.start ||
        s.jobs[mj].start + ins.processing_times[mj] - 1 > idle_win.end())
      throw std::invalid_argument(
          "eps move: target record does not match the schedule");
  }
}

} // namespace

EpsMoveResult apply_eps_move_unchecked(const Instance& ins,
                                       const FeasibleSchedule& s,
                                       const EpsRecord& idle_win,
                                       const EpsRecord& job_win) {
  check_move_preconditions(ins, s, idle_win, job_win);
  const int len = job_win.length;
  const int mover = job_win.member_jobs[0];
  const double rate_j = ins.consumption_rates[job_win.machine];

  Schedule g = s.to_schedule(ins);

  // The single job fills the idle window exactly.
  g.jobs[mover].machine = idle_win.machine;
  g.jobs[mover].slots.resize(len);
  std::iota(g.jobs[mover].slots.begin(), g.jobs[mover].slots.end(),
            idle_win.start);

  // Evicted jobs go to the vacated window, longest first, each onto its
  // cheapest sub-location (a window of consecutive entries of the free-slot
  // list, so it may be fragmented around already-replaced jobs); ties take
  // the earliest first slot. The final repair repacks any fragments.
  std::vector<int> evicted = idle_win.member_jobs;
  std::sort(evicted.begin(), evicted.end(), [&](int a, int b) {
    if (ins.processing_times[a] != ins.processing_times[b])
      return ins.processing_times[a] > ins.processing_times[b];
    return a < b;
  });
  std::vector<int> free(len);
  std::iota(free.begin(), free.end(), job_win.start);
  double placed_cost = 0.0;
  for (int j : evicted) {
    int p = ins.processing_times[j];
    double best = std::numeric_limits<double>::infinity();
    int best_pos = -1;
    for (int pos = 0; pos + p <= (int)free.size(); ++pos) {
      double sum = 0.0;
      for (int k = 0; k < p; ++k) sum += ins.slot_costs[free[pos + k] - 1];
      double cost = rate_j * sum;
      if (cost < best) {
        best = cost;
        best_pos = pos;
      }
    }
    if (best_pos < 0)
      throw std::logic_error("eps move: evicted job does not fit");
    g.jobs[j].machine = job_win.machine;
    g.jobs[j].slots.assign(free.begin() + best_pos,
                           free.begin() + best_pos + p);
    free.erase(free.begin() + best_pos, free.begin() + best_pos + p);
    placed_cost += best;
  }

  EpsMoveResult r;
  r.schedule = convert_schedule(ins, g);
  r.delta = (idle_win.window_sum + placed_cost) -
            (idle_win.sub_tec + job_win.sub_tec);
  r.outcome = EpsMoveOutcome::Applied;
  return r;
}

EpsMoveResult evaluate_eps_move(const Instance& ins, const FeasibleSchedule& s,
                                const EpsRecord& idle_win,
                                const EpsRecord& job_win) {
  check_move_preconditions(ins, s, idle_win, job_win);
  // Cheapest conceivable outcome: the job pays the full target window, the
  // evicted jobs pay the cheapest slots of the vacated one. If even that is
  // no better than the current cost, skip without building anything.
  double now = idle_win.sub_tec + job_win.sub_tec;
  double bound =
      idle_win.window_sum + job_win.sorted_prefix[idle_win.assigned_count];
  if (now <= bound + kTecTolerance)
    return {s, 0.0, EpsMoveOutcome::PrunedByBound};

  EpsMoveResult r = apply_eps_move_unchecked(ins, s, idle_win, job_win);
  // The swap can only fill slots up to the target window's end, but when the
  // target lies wholly in idle tail space past every job, that end may
  // exceed the current makespan; such a move trades one objective for the
  // other and is not taken.
  if (evaluate(ins, r.schedule).makespan > evaluate(ins, s).makespan)
    return {s, 0.0, EpsMoveOutcome::SkippedMakespan};
  return r;
}

FeasibleSchedule exchange_search(const Instance& ins, const FeasibleSchedule& s,
                                 ExchangeStats* stats,
                                 const ExchangeOptions& opt) {
  ins.validate();
  Classification cls = classify(ins, s.to_schedule(ins));
  if (cls.cls != ScheduleClass::Feasible)
    throw std::invalid_argument(
        std::string("exchange_search: input schedule is ") +
        to_string(cls.cls) + ", expected feasible");

  const int horizon = ins.n_slots;
  DerivedData d = derive(ins, horizon);
  Objectives before = evaluate(ins, s);

  FeasibleSchedule cur = s;
  Timelines tl = Timelines::from(ins, cur);
  EpsIndex idx = build_eps_index(ins, tl);

  std::vector<int> lens(d.distinct_ptimes.rbegin(), d.distinct_ptimes.rend());
  const int sweep_cap = 10 * horizon;
  ExchangeStats st;

  bool improved = true;
  while (improved) {
    improved = false;
    if (st.sweeps >= sweep_cap) {
      st.hit_sweep_cap = true;
      break;
    }
    ++st.sweeps;
    for (int len : lens) {
      std::vector<long long> jkeys;
      for (const auto& [k, r] : idx.job_windows[len]) {
        (void)r;
        jkeys.push_back(k);
      }
      for (long long jk : jkeys) {
        auto jit = idx.job_windows[len].find(jk);
        if (jit == idx.job_windows[len].end()) continue; // consumed by a move
        std::vector<long long> ikeys;
        for (const auto& [k, r] : idx.idle_windows[len]) {
          (void)r;
          ikeys.push_back(k);
        }
        for (long long ik : ikeys) {
          auto iit = idx.idle_windows[len].find(ik);
          if (iit == idx.idle_windows[len].end()) continue;
          EpsRecord job_win = jit->second; // copies survive the index update
          EpsRecord idle_win = iit->second;
          if (job_win.machine == idle_win.machine &&
              !(job_win.end() < idle_win.start ||
                idle_win.end() < job_win.start))
            continue;
          EpsMoveResult r = evaluate_eps_move(ins, cur, idle_win, job_win);
          if (r.outcome != EpsMoveOutcome::Applied ||
              r.delta >= -kTecTolerance)
            continue;
          cur = std::move(r.schedule);
          tl = Timelines::from(ins, cur);
          int pad = d.p_max - 1;
          update_eps(ins, tl, idx, job_win.machine,
                     std::max(1, job_win.start - pad),
                     std::min(horizon, job_win.end() + pad));
          update_eps(ins, tl, idx, idle_win.machine,
                     std::max(1, idle_win.start - pad),
                     std::min(horizon, idle_win.end() + pad));
          ++st.accepted_moves;
          improved = true;
          if (opt.verify_index) {
            EpsIndex fresh = build_eps_index(ins, tl);
            auto same = [](const std::map<int, std::map<long long, EpsRecord>>& a,
                           const std::map<int, std::map<long long, EpsRecord>>& b) {
              auto nonempty = [](const auto& m) {
                std::size_t n = 0;
                for (const auto& [len2, inner] : m) {
                  (void)len2;
                  n += inner.size();
                }
                return n;
              };
              if (nonempty(a) != nonempty(b)) return false;
              for (const auto& [len2, inner] : a) {
                auto itb = b.find(len2);
                if (inner.empty()) continue;
                if (itb == b.end() || inner.size() != itb->second.size())
                  return false;
                for (const auto& [key, ra] : inner) {
                  auto rb = itb->second.find(key);
                  if (rb == itb->second.end()) return false;
                  const EpsRecord& x = ra;
                  const EpsRecord& y = rb->second;
                  if (x.machine != y.machine || x.start != y.start ||
                      x.length != y.length || x.kind != y.kind ||
                      x.member_jobs != y.member_jobs ||
                      x.assigned_count != y.assigned_count ||
                      std::fabs(x.window_sum - y.window_sum) > 1e-6 ||
                      std::fabs(x.sub_tec - y.sub_tec) > 1e-6)
                    return false;
                }
              }
              return true;
            };
            if (!same(idx.job_windows, fresh.job_windows) ||
                !same(idx.idle_windows, fresh.idle_windows))
              throw std::logic_error(
                  "exchange_search: incremental window index diverged from a "
                  "from-scratch rebuild");
          }
          break; // move on to the next source window
        }
      }
    }
  }

  Objectives after = evaluate(ins, cur);
  if (after.tec > before.tec + kTecTolerance || after.makespan > before.makespan)
    throw std::logic_error("exchange_search: result worse than its input");
  if (stats) *stats = st;
  return cur;
}

} // namespace bpmstp
