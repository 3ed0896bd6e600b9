#pragma once

// Mixed-binary linear models of the scheduling problem, plus helpers to move
// between models, solutions, and schedules.
//
// Two families are built, both over a horizon of K̂ slots:
//  * job-start model: binary x_{j,h,t} = 1 iff slot t is the first slot of
//    job j on machine h. N*M*K̂ binaries plus E and Cmax.
//  * ptime-start model: binary y_{d,h,t} = 1 iff some job with processing
//    time d starts at slot t on machine h (jobs of equal length are
//    interchangeable). |P|*M*K̂ binaries plus E and Cmax, where P is the set
//    of distinct processing times.
// Every start variable is declared even when a start that late cannot finish
// within the horizon; unusable starts are pinned to 0 through their bounds.
// The `reduced` variants minimize energy cost over the downsized horizon
// only: no constraint row references Cmax (the horizon itself caps the
// makespan), which is what the exact level scan solves per level.

#include <array>
#include <string>
#include <vector>

#include "bpmstp/core.hpp"

namespace bpmstp {

enum class VarType { Binary, Continuous };
enum class RowSense { LE, EQ, GE };

struct MilpVar {
  std::string name;
  VarType type = VarType::Continuous;
  double lb = 0.0;
  double ub = 0.0;
};

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

struct MilpRow {
  std::string name;
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

struct MilpModel {
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  std::vector<LinTerm> objective; // always minimized
  double objective_constant = 0.0;

  std::string family; // "job-start", "ptime-start", or "imported"
  int horizon = 0;
  bool reduced = false;

  int e_var = -1;    // index of the energy-cost variable, -1 if absent
  int cmax_var = -1; // index of the makespan variable, -1 if absent

  // For start variables: key[i] = {job-or-ptime, machine (0-based),
  // start slot (1-based)}; empty for imported models.
  std::vector<std::array<int, 3>> start_keys; // parallel to vars, {-1,-1,-1}
                                              // for non-start variables

  int find_var(const std::string& name) const; // -1 if absent
};

MilpModel build_f1(const Instance& ins, int horizon, bool reduced = false);
MilpModel build_f2(const Instance& ins, int horizon, bool reduced = false);

// Largest number of distinct processing times any feasible instance can have
// on m machines over k slots: distinct lengths 1,2,3,... must fit the total
// capacity m*k, so the answer is the largest q with q*(q+1)/2 <= m*k.
int distinct_ptime_bound(long long machines, long long slots);

struct FeasibilityCheck {
  enum class Status { Ok, FailCapacity, FailDistinct };
  Status status = Status::Ok;
  long long load = 0;          // total processing time
  long long capacity = 0;      // machines * horizon
  int distinct = 0;            // distinct processing times
  int distinct_limit = 0;      // bound above
};

// Necessary (not sufficient) conditions for a feasible schedule to exist
// within `horizon` slots.
FeasibilityCheck necessary_feasibility(const Instance& ins, int horizon);

// Decodes set y variables — triples (ptime, machine 0-based, start 1-based)
// — into a schedule, handing jobs of each length out in ascending job order.
// Rejects (throws) unknown lengths, count mismatches, overlaps, and windows
// leaving [1, horizon].
FeasibleSchedule schedule_from_y(const Instance& ins, int horizon,
                                 const std::vector<std::array<int, 3>>& set_y);

// The reverse direction: the y triples a feasible schedule induces.
std::vector<std::array<int, 3>> warm_start_from_schedule(
    const Instance& ins, const FeasibleSchedule& s);

// Deterministic LP-format text for the model (same model => same bytes).
std::string export_lp(const MilpModel& model);

// Parses the LP subset emitted by export_lp (Minimize / Subject To / Bounds /
// Binaries / End). Throws std::invalid_argument with a line reference on
// anything it does not understand.
MilpModel import_lp(const std::string& text);

} // namespace bpmstp
