#pragma once

// Constructive heuristics and the level-scan wrappers that turn them into
// trade-off fronts.

#include <optional>

#include "bpmstp/core.hpp"
#include "bpmstp/rng.hpp"

namespace bpmstp {

// Repairs a schedule whose fragmented jobs all have their gaps covered by
// other jobs (class Feasible or Split): on each machine, jobs are repacked
// onto adjacent slots, in increasing order of their original first slot,
// each starting no earlier than its original first slot. The per-machine
// slot multiset — hence both objectives — and the per-machine ordering of
// first slots are preserved. Throws on PreemptiveNonSplit or Invalid input.
FeasibleSchedule convert_schedule(const Instance& ins, const Schedule& s);

// Greedy constructor: processes distinct processing times longest first and
// puts each job on a currently cheapest free location (possibly fragmented,
// repaired at the end), breaking cost ties uniformly at random. Returns
// nullopt when some job runs out of locations within the horizon.
std::optional<FeasibleSchedule> sgh(const Instance& ins, Rng& rng);

// Level scan: runs the greedy constructor at every horizon from K down to
// the makespan lower bound, stopping early at the first failed level, and
// keeps the non-dominated outcomes.
Front sgs(const Instance& ins, std::uint64_t seed);

// Same scan, with the exchange-based local search applied to every level's
// schedule before collecting it.
Front sgs_es(const Instance& ins, std::uint64_t seed);

// Baseline: longest-first list scheduling onto cheapest adjacent-only
// locations (ties: earliest start), followed by a block-shift local search
// that never worsens the makespan; levels are rescanned at K̂ = makespan - 1
// after a success and K̂ - 1 after a failure. Only feasible, complete
// schedules are collected.
Front ch_j(const Instance& ins, std::uint64_t seed = 0);

} // namespace bpmstp
