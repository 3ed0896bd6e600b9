#pragma once

// Exact trade-off fronts. exact_pareto walks makespan budgets downward,
// solving one reduced ptime-start model per budget; oracle_pareto enumerates
// every feasible schedule outright and exists to cross-check the scan on
// small instances.

#include <vector>

#include "bpmstp/core.hpp"
#include "bpmstp/solver.hpp"

namespace bpmstp {

// One backend call of the level scan. The scan may end without a final log
// entry when the necessary feasibility conditions already fail for the next
// budget.
struct LevelLog {
  int horizon = 0; // makespan budget solved at this level
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;      // optimal energy cost (when status == Optimal)
  int makespan = 0;            // achieved makespan of the decoded schedule
  bool warm_supplied = false;  // a warm start was handed to the backend
  double warm_objective = 0.0; // its energy cost (meaningful iff supplied)
  long long nodes = 0;         // backend search nodes (built-in only)
};

struct ExactOptions {
  bool warm_start = false; // seed each level with a greedy schedule
  unsigned seed = 0;       // seed for the warm-start heuristic
  double time_limit_seconds = 0.0; // per backend call, 0 = unlimited
  SolverBackend* backend = nullptr; // null = built-in
  int kmax = 0;            // first makespan budget; <= 0 means all K slots
};

struct ExactResult {
  Front front;            // Pareto-optimal points, makespan ascending
  bool truncated = false; // a level timed out or errored; front is partial
  std::vector<LevelLog> levels; // one entry per backend call, in scan order
};

ExactResult exact_pareto(const Instance& ins, const ExactOptions& opt = {});

// Brute-force reference front. Enumerates all placements (equal-length jobs
// deduplicated by forcing their placements into ascending order) and keeps
// the cheapest schedule per makespan. Refuses instances beyond 8 jobs, 4
// machines, or 16 slots unless allow_large is set; 64 slots is a hard cap.
Front oracle_pareto(const Instance& ins, bool allow_large = false);

} // namespace bpmstp
