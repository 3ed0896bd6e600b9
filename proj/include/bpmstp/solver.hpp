#pragma once

// Backends that minimize a MilpModel.
//
// The built-in backend is a depth-first branch-and-bound over the binary
// variables in declaration order, with activity propagation and a
// combinatorial lower bound; it solves the model families this library
// builds (and anything structurally similar: at most one continuous variable
// per row) to proven optimality. It exists so the toolkit runs end to end
// with no third-party solver.
//
// The external backend shells out to any command implementing a small
// protocol:   <command> <model.lp> <solution-out>
// The command reads the LP file, writes "name value" lines (one variable per
// line, unknown names ignored, missing names read as 0) to the output path,
// and exits 0 for optimal, 1 for infeasible, 3 for a time limit with a
// best-known solution written, anything else for failure. Warm starts are a
// built-in-backend feature; the external protocol ignores them.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bpmstp/milp.hpp"

namespace bpmstp {

enum class SolveStatus { Optimal, Infeasible, TimeLimit, Error };

struct SolveOptions {
  double time_limit_seconds = 0.0; // 0 = unlimited
  // Relative optimality gap offered to external solvers; the built-in
  // backend always proves exact optimality and ignores it.
  double gap_tolerance = 1e-4;
  // Binary assignments seeding the incumbent: (variable index, value).
  // Variables not listed are taken as 0.
  std::vector<std::pair<int, double>> warm_start;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  std::vector<double> values; // per variable, empty unless a solution exists
  double objective = 0.0;
  long long nodes = 0; // built-in backend only
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SolveResult solve(const MilpModel& model, const SolveOptions& opt) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<SolverBackend> make_builtin_backend();
std::unique_ptr<SolverBackend> make_external_backend(std::string command);

} // namespace bpmstp
