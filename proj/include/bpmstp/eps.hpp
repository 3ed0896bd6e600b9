#pragma once

// Exchangeable-window machinery. A window of adjacent slots on one machine
// is *exchangeable* when every job touching it lies wholly inside it, so the
// window's content can be swapped with any equal-length exchangeable window
// without disturbing the rest of the schedule. Windows holding exactly one
// job and no idle slot (kind JobOnly) are swap sources; windows with at
// least one idle slot (kind Idle) are swap targets.

#include <cstdint>
#include <map>
#include <vector>

#include "bpmstp/core.hpp"
#include "bpmstp/timeline.hpp"

namespace bpmstp {

enum class EpsKind { JobOnly, Idle };

struct EpsRecord {
  int machine = 0; // 0-based
  int start = 0;   // 1-based first slot
  int length = 0;  // window length (slots)
  EpsKind kind = EpsKind::Idle;
  std::vector<int> member_jobs; // jobs wholly inside, by ascending start
  int assigned_count = 0;       // occupied slots in the window
  double window_sum = 0.0;      // rate * total window price (cost of filling it)
  // sorted_prefix[n] = rate * sum of the n cheapest slot prices in the
  // window, n = 0..length. sorted_prefix[length] == window_sum.
  std::vector<double> sorted_prefix;
  double sub_tec = 0.0; // energy cost of the member jobs as scheduled

  int end() const { return start + length - 1; }
};

// Index key: unique per (machine, start) given the horizon; ordered maps on
// it iterate machines, then starts, ascending.
inline long long eps_key(int horizon, int machine, int start) {
  return (long long)horizon * machine + start;
}

struct EpsIndex {
  int horizon = 0;
  // kind -> per window length, keyed by eps_key.
  std::map<int, std::map<long long, EpsRecord>> job_windows;
  std::map<int, std::map<long long, EpsRecord>> idle_windows;
};

// Scans the given machines for exchangeable windows of each given length
// whose slots lie inside [lo, hi]. Multi-job windows without idle slots are
// deliberately not reported (they are neither swap sources nor targets).
void find_eps(const Instance& ins, const Timelines& tl,
              const std::vector<int>& machines, int lo, int hi,
              const std::vector<int>& lengths, std::vector<EpsRecord>* out_job,
              std::vector<EpsRecord>* out_idle);

// Full-schedule index over all machines, every distinct processing time.
EpsIndex build_eps_index(const Instance& ins, const Timelines& tl);

// Re-derives every index entry on `machine` whose window intersects
// [lo, hi]. Afterwards the index equals a from-scratch build, provided all
// slots whose occupancy changed lie within [lo, hi].
void update_eps(const Instance& ins, const Timelines& tl, EpsIndex& index,
                int machine, int lo, int hi);

enum class EpsMoveOutcome {
  Applied,         // swap performed; `schedule` and `delta` are the result
  PrunedByBound,   // cost bound proves the swap cannot improve
  SkippedMakespan, // swap would push the makespan up; discarded
};

struct EpsMoveResult {
  FeasibleSchedule schedule; // input schedule unless Applied
  double delta = 0.0;        // tec(after) - tec(before); 0 unless Applied
  EpsMoveOutcome outcome = EpsMoveOutcome::PrunedByBound;
};

// Tries to relocate the single job of `job_win` into `idle_win` (which it
// fills exactly), moving the jobs of `idle_win` into the vacated window,
// repacked greedily onto its cheapest sub-locations. Both records must
// describe `s`, have equal length, and not overlap. The swap is first
// screened by a lower bound: if
//   sub_tec(I) + sub_tec(J) <= window_sum(I) + sorted_prefix(J)[assigned(I)]
// the move cannot reduce the energy cost and is pruned.
EpsMoveResult evaluate_eps_move(const Instance& ins, const FeasibleSchedule& s,
                                const EpsRecord& idle_win,
                                const EpsRecord& job_win);

// Same swap with no bound screen and no makespan guard: always applies.
// Exists so the bound's soundness can be checked exhaustively in tests.
EpsMoveResult apply_eps_move_unchecked(const Instance& ins,
                                       const FeasibleSchedule& s,
                                       const EpsRecord& idle_win,
                                       const EpsRecord& job_win);

struct ExchangeOptions {
  // After every accepted move, assert that the incrementally maintained
  // index matches a from-scratch rebuild (testing aid; throws on mismatch).
  bool verify_index = false;
};

struct ExchangeStats {
  int accepted_moves = 0;
  int sweeps = 0;
  bool hit_sweep_cap = false; // diagnostic only; result is still valid
};

// First-improvement local search over window swaps, longest windows first,
// windows visited by (machine, start). Repeats until a full sweep accepts
// nothing (sweeps are capped at 10 * horizon as a safety valve). Neither
// objective ever increases.
FeasibleSchedule exchange_search(const Instance& ins, const FeasibleSchedule& s,
                                 ExchangeStats* stats = nullptr,
                                 const ExchangeOptions& opt = {});

} // namespace bpmstp
