#pragma once

// Core data model for bi-objective scheduling of jobs on identical parallel
// machines over a discrete horizon of unit time slots with per-slot energy
// prices and per-machine consumption rates.
//
// Conventions used across the whole library:
//   * time slots are 1-based (slot t covers the t-th unit interval),
//   * machines and jobs are 0-based in memory, 1-based in every file format,
//   * both objectives (makespan, total energy cost) are minimized,
//   * energy-cost comparisons use an absolute tolerance of kTecTolerance.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpmstp {

// Absolute tolerance for all total-energy-cost comparisons.
inline constexpr double kTecTolerance = 1e-9;

struct Instance {
  int n_jobs = 0;     // N
  int n_machines = 0; // M
  int n_slots = 0;    // K (scheduling horizon, in unit slots)

  std::vector<int> processing_times;     // size N, each in [1, K]
  std::vector<double> consumption_rates; // size M, non-negative
  std::vector<double> slot_costs;        // size K, non-negative

  long long total_load() const; // sum of processing times

  // Throws std::invalid_argument when any structural invariant is violated
  // (sizes, positivity, p_j <= K).
  void validate() const;
};

// Restriction of an instance to the first `horizon` slots (same jobs and
// machines, slot costs truncated). Requires 1 <= horizon <= ins.n_slots.
Instance downsize(const Instance& ins, int horizon);

// General schedule form: each job holds the exact set of slots it occupies on
// its machine. Only intermediates produced while repairing split assignments
// need this generality; final results always use FeasibleSchedule.
struct Schedule {
  struct JobSlots {
    int machine = -1;       // 0-based; -1 means unassigned
    std::vector<int> slots; // 1-based, strictly increasing
  };
  std::vector<JobSlots> jobs; // size N, indexed by job
};

// Compact form for schedules whose jobs all occupy adjacent slots: job j runs
// on `machine` during slots [start, start + p_j - 1].
struct FeasibleSchedule {
  struct Placement {
    int machine = -1;
    int start = 0; // 1-based
  };
  std::vector<Placement> jobs; // size N, indexed by job

  Schedule to_schedule(const Instance& ins) const;
};

struct Objectives {
  int makespan = 0; // max completion slot over all jobs
  double tec = 0.0; // total energy cost
};

bool same_point(const Objectives& a, const Objectives& b);

enum class ScheduleClass {
  Feasible,           // every job occupies adjacent slots
  Split,              // some job is fragmented, but every internal gap of a
                      // fragmented job is covered by other jobs' slots on the
                      // same machine (repairable without changing objectives)
  PreemptiveNonSplit, // some fragmented job has an internal gap containing an
                      // idle slot (not repairable in place)
  Invalid,            // structurally broken, see InvalidReason
};

enum class InvalidReason {
  None,
  Overlap,          // two jobs share a slot on one machine
  MissingJob,       // a job has no machine or no slots
  OutOfRangeSlot,   // a slot outside [1, K] or a machine outside [0, M)
  WrongCardinality, // |slots| != p_j (duplicate slots count once)
};

struct Classification {
  ScheduleClass cls = ScheduleClass::Invalid;
  InvalidReason reason = InvalidReason::None;
};

const char* to_string(ScheduleClass c);
const char* to_string(InvalidReason r);

// Classifies a schedule; never throws on bad input (that is the point).
Classification classify(const Instance& ins, const Schedule& s);

// Objectives of a complete, non-overlapping schedule. Split and
// preemptive schedules evaluate fine; Invalid ones throw.
Objectives evaluate(const Instance& ins, const Schedule& s);
Objectives evaluate(const Instance& ins, const FeasibleSchedule& s);

// Per-horizon précomputations shared by the heuristics and the models.
struct DerivedData {
  int horizon = 0;                 // the K̂ this data was derived for
  std::vector<int> distinct_ptimes; // ascending distinct processing times
  std::map<int, std::vector<int>> jobs_by_ptime; // d -> ascending job ids
  // window_cost[d][t-1] = sum of slot_costs[t-1 .. t+d-2], t in [1, K̂-d+1]:
  // the unscaled price of running length-d work starting at slot t.
  std::map<int, std::vector<double>> window_cost;
  // cum_price[h][t] = rate_h * sum of the first t slot costs; [0] = 0.
  // Price of running on machine h over slots [a, b] is cum[b] - cum[a-1].
  std::vector<std::vector<double>> cum_price;
  int p_max = 0;
  int k_lower = 0; // lower_bound_makespan of the full instance
  int omega = 0;   // min(N, K̂)
};

DerivedData derive(const Instance& ins, int horizon);

// max( floor(total load / M), longest job ): no feasible schedule can finish
// before this slot.
int lower_bound_makespan(const Instance& ins);

// One point of a trade-off front. Solutions produced by the solvers in this
// library are always feasible; the flag and the unscheduled count exist so
// fronts coming from weaker baselines can still be scored.
struct FrontPoint {
  Objectives obj;
  std::optional<FeasibleSchedule> schedule;
  bool feasible = true;
  int unscheduled = 0; // jobs left out when infeasible
};

// Non-dominated points sorted by ascending makespan; energy cost is then
// strictly descending. Duplicates (within tolerance) are collapsed.
struct Front {
  std::vector<FrontPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

// Keeps exactly the non-dominated points of `pts` under (min makespan,
// min tec) dominance; ties on tec are resolved within kTecTolerance. The
// first point seen wins among exact duplicates.
Front pareto_filter(std::vector<FrontPoint> pts);

} // namespace bpmstp
