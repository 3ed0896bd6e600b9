#pragma once

// Benchmark instance generation, experiment orchestration, and the CSV
// reports the command-line tool emits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpmstp/core.hpp"
#include "bpmstp/exact.hpp"
#include "bpmstp/metrics.hpp"

namespace bpmstp {

struct GeneratorParams {
  int n = 0;
  int m = 0;
  int k = 0;
  int p_max = 12; // processing times uniform on [1, p_max]
  int u_max = 6;  // machine rates uniform on [1, u_max]
  int c_max = 8;  // slot costs uniform on [1, c_max]
  std::uint64_t seed = 0;
};

// Deterministic for a given seed; the three value streams are drawn in a
// fixed order (all processing times, then all rates, then all slot costs).
Instance generate_instance(const GeneratorParams& prm);

enum class Algorithm { Sgh, Sgs, SgsEs, Ch, Exact, Oracle };

const char* to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::Sgs;
  std::uint64_t seed = 0;
  int runs = 1;                     // heuristics only; exact/oracle run once
  double time_limit_seconds = 0.0;  // exact only, per backend call
  bool warm_start = false;          // exact only
  SolverBackend* backend = nullptr; // exact only; null = built-in
  int kmax = 0;                     // exact only; <= 0 means all K slots
};

struct RunOutcome {
  std::uint64_t seed = 0;
  Front front;
  double seconds = 0.0;
  bool truncated = false;       // exact level scan stopped on a limit
  std::vector<LevelLog> levels; // exact only
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
};

// Runs config.algorithm with seeds seed, seed + 1, ... (one outcome per run;
// exact and oracle produce a single outcome). Touches no files.
ExperimentResult run_experiment(const Instance& ins, const RunConfig& cfg);

// Writes front_run<r>.csv, schedule sidecars front_run<r>_p<i>.sched for
// every point that carries a schedule, and summary.csv into out_dir (which
// must exist or be creatable).
void write_experiment(const RunConfig& cfg, const ExperimentResult& res,
                      const std::string& out_dir);

// One row per front — columns front,points,hypervolume,purity,d_r,spacing,
// spread,fm1,fm2 — scored against `reference`, with an "average" row over
// the present values appended. Metrics whose inputs are missing (no
// reference, no reference point, too few points) stay empty.
std::string emit_metrics(const std::vector<std::string>& labels,
                         const std::vector<Front>& fronts,
                         const std::vector<Point2>& reference,
                         std::optional<Point2> reference_point,
                         int n_jobs = 1);

// Attainment data: one row per query point with columns makespan,tec,
// fraction.
std::string emit_eaf(const std::vector<std::vector<Point2>>& fronts,
                     const std::vector<Point2>& queries);

} // namespace bpmstp
