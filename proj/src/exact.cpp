#include "bpmstp/exact.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>

#include "bpmstp/heuristics.hpp"
#include "bpmstp/milp.hpp"
#include "bpmstp/rng.hpp"

namespace bpmstp {

// ---------------------------------------------------------------------------
// Level scan.
// ---------------------------------------------------------------------------

ExactResult exact_pareto(const Instance& ins, const ExactOptions& opt) {
  ins.validate();
  ExactResult res;

  std::unique_ptr<SolverBackend> own;
  SolverBackend* backend = opt.backend;
  if (backend == nullptr) {
    own = make_builtin_backend();
    backend = own.get();
  }

  const int k_low = lower_bound_makespan(ins);
  int khat = (opt.kmax >= 1) ? std::min(opt.kmax, ins.n_slots) : ins.n_slots;
  Rng rng(opt.seed);

  std::vector<FrontPoint> pts;
  while (khat >= k_low) {
    if (necessary_feasibility(ins, khat).status !=
        FeasibilityCheck::Status::Ok)
      break;

    MilpModel model = build_f2(ins, khat, /*reduced=*/true);
    SolveOptions sopt;
    sopt.time_limit_seconds = opt.time_limit_seconds;

    LevelLog log;
    log.horizon = khat;
    if (opt.warm_start) {
      Instance sub = downsize(ins, khat);
      if (auto seed_schedule = sgh(sub, rng)) {
        log.warm_supplied = true;
        log.warm_objective = evaluate(sub, *seed_schedule).tec;
        std::map<std::array<int, 3>, int> var_of;
        for (std::size_t v = 0; v < model.vars.size(); ++v)
          if (model.start_keys[v][0] != -1)
            var_of[model.start_keys[v]] = (int)v;
        for (const auto& key : warm_start_from_schedule(sub, *seed_schedule))
          sopt.warm_start.push_back({var_of.at(key), 1.0});
      }
    }

    SolveResult sr = backend->solve(model, sopt);
    log.status = sr.status;
    log.nodes = sr.nodes;

    if (sr.status == SolveStatus::Optimal) {
      std::vector<std::array<int, 3>> set_y;
      for (std::size_t v = 0; v < model.vars.size(); ++v)
        if (model.start_keys[v][0] != -1 && sr.values[v] > 0.5)
          set_y.push_back(model.start_keys[v]);
      FeasibleSchedule fs = schedule_from_y(ins, khat, set_y);
      Objectives obj = evaluate(ins, fs);
      log.objective = sr.objective;
      log.makespan = obj.makespan;
      res.levels.push_back(log);
      pts.push_back(FrontPoint{obj, fs, true, 0});
      khat = obj.makespan - 1;
    } else if (sr.status == SolveStatus::Infeasible) {
      res.levels.push_back(log);
      break;
    } else { // TimeLimit or Error: the scan below this budget is unknown
      res.levels.push_back(log);
      res.truncated = true;
      break;
    }
  }

  res.front = pareto_filter(std::move(pts));
  return res;
}

// ---------------------------------------------------------------------------
// Brute-force oracle.
// ---------------------------------------------------------------------------

namespace {

struct OracleSearch {
  const Instance* ins = nullptr;
  int horizon = 0;
  std::vector<int> order; // job ids, longest first, id ascending on ties
  std::vector<std::uint64_t> busy; // per machine, bit (t-1) = slot t taken
  std::vector<FeasibleSchedule::Placement> cur;
  std::vector<double> cum; // cum[t] = c_1 + ... + c_t, cum[0] = 0
  // makespan -> (energy cost, placements); only improved strictly.
  std::map<int, std::pair<double, std::vector<FeasibleSchedule::Placement>>>
      best;

  // A completion of the current partial schedule has makespan >= cmax and
  // energy cost >= tec, so an already-recorded point at (m <= cmax,
  // cost <= tec) weakly dominates everything below this node.
  bool dominated(int cmax, double tec) const {
    for (const auto& [m, entry] : best) {
      if (m > cmax) break;
      if (entry.first <= tec + 1e-12) return true;
    }
    return false;
  }

  void record(int cmax, double tec) {
    auto it = best.find(cmax);
    if (it == best.end())
      best.emplace(cmax, std::make_pair(tec, cur));
    else if (tec < it->second.first - 1e-12)
      it->second = {tec, cur};
  }

  void dfs(std::size_t idx, int cmax, double tec, int prev_h, int prev_t) {
    if (idx == order.size()) {
      record(cmax, tec);
      return;
    }
    int job = order[idx];
    int p = ins->processing_times[job];
    bool same_group =
        idx > 0 && ins->processing_times[order[idx - 1]] == p;
    int h0 = same_group ? prev_h : 0;
    for (int h = h0; h < ins->n_machines; ++h) {
      int t_first = (same_group && h == h0) ? prev_t + 1 : 1;
      for (int t = t_first; t + p - 1 <= horizon; ++t) {
        std::uint64_t mask = ((p == 64 ? ~0ULL : ((1ULL << p) - 1)) << (t - 1));
        if (busy[h] & mask) continue;
        double cost =
            ins->consumption_rates[h] * (cum[t + p - 1] - cum[t - 1]);
        int cmax2 = std::max(cmax, t + p - 1);
        if (dominated(cmax2, tec + cost)) continue;
        busy[h] |= mask;
        cur[job] = {h, t};
        dfs(idx + 1, cmax2, tec + cost, h, t);
        busy[h] &= ~mask;
      }
    }
  }
};

} // namespace

Front oracle_pareto(const Instance& ins, bool allow_large) {
  ins.validate();
  if (!allow_large &&
      (ins.n_jobs > 8 || ins.n_machines > 4 || ins.n_slots > 16))
    throw std::invalid_argument(
        "oracle_pareto: instance too large for exhaustive search "
        "(pass allow_large to override)");
  if (ins.n_slots > 64)
    throw std::invalid_argument("oracle_pareto: more than 64 slots");

  OracleSearch s;
  s.ins = &ins;
  s.horizon = ins.n_slots;
  s.order.resize(ins.n_jobs);
  for (int j = 0; j < ins.n_jobs; ++j) s.order[j] = j;
  std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) {
    return ins.processing_times[a] > ins.processing_times[b];
  });
  s.busy.assign(ins.n_machines, 0);
  s.cur.assign(ins.n_jobs, {});
  s.cum.assign(ins.n_slots + 1, 0.0);
  for (int t = 1; t <= ins.n_slots; ++t)
    s.cum[t] = s.cum[t - 1] + ins.slot_costs[t - 1];

  s.dfs(0, 0, 0.0, 0, 0);

  std::vector<FrontPoint> pts;
  for (const auto& [m, entry] : s.best) {
    FeasibleSchedule fs{entry.second};
    pts.push_back(FrontPoint{Objectives{m, entry.first}, fs, true, 0});
  }
  return pareto_filter(std::move(pts));
}

} // namespace bpmstp
