#pragma once

// Per-machine occupancy structure: an ordered map from start slot to the job
// running there. All queries and updates are logarithmic in the number of
// jobs on the machine.

#include <map>
#include <vector>

#include "bpmstp/core.hpp"

namespace bpmstp {

struct TimelineEntry {
  int job = -1;
  int start = 0; // 1-based, inclusive
  int end = 0;   // 1-based, inclusive
};

class MachineTimeline {
 public:
  MachineTimeline() = default;
  explicit MachineTimeline(int horizon) : horizon_(horizon) {}

  int horizon() const { return horizon_; }
  bool empty() const { return by_start_.empty(); }
  std::size_t size() const { return by_start_.size(); }

  // Inserts job over [start, start+len-1]; returns false on overlap or
  // out-of-range without modifying anything.
  bool insert(int job, int start, int len);

  // Removes the entry starting exactly at `start` (no-op if absent).
  void erase_at(int start);

  // Entry covering slot t, or nullptr if t is idle / out of range.
  const TimelineEntry* occupant(int t) const;

  // First entry with start >= t, or nullptr.
  const TimelineEntry* first_starting_at_or_after(int t) const;

  // Last occupied slot on this machine (0 when empty).
  int last_assigned() const;

  // Idle slots within [lo, hi], ascending.
  std::vector<int> free_slots(int lo, int hi) const;

  // Entries whose start lies in [lo, hi], ascending by start.
  std::vector<TimelineEntry> entries_starting_in(int lo, int hi) const;

  const std::map<int, TimelineEntry>& entries() const { return by_start_; }

 private:
  int horizon_ = 0;
  std::map<int, TimelineEntry> by_start_;
};

// All machines of one schedule.
struct Timelines {
  std::vector<MachineTimeline> machines;

  static Timelines from(const Instance& ins, const FeasibleSchedule& s);
  FeasibleSchedule to_feasible(const Instance& ins) const;
  int makespan() const;
};

} // namespace bpmstp
