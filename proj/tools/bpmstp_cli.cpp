// Command-line front end: instance generation, solving, front metrics,
// attainment data, and a stand-alone MILP solve speaking the external-backend
// protocol.
//
// Exit codes: 0 success, 1 infeasible or empty result, 2 usage/parse error.
// (`milp-solve` follows the backend protocol instead: 0 optimal,
// 1 infeasible, 3 time limit with an incumbent written, 4 error.)

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpmstp/bench.hpp"
#include "bpmstp/io.hpp"
#include "bpmstp/milp.hpp"
#include "bpmstp/solver.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_generate(const bpmstp::GeneratorParams& prm, const std::string& out) {
  bpmstp::write_instance(bpmstp::generate_instance(prm), out);
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& algo_name,
              const std::string& backend_spec, std::uint64_t seed, int runs,
              double time_limit, bool warm_start, int kmax,
              const std::string& out_dir) {
  bpmstp::Instance ins = bpmstp::read_instance(instance_path);

  auto algo = bpmstp::parse_algorithm(algo_name);
  if (!algo)
    throw UsageError("unknown algorithm '" + algo_name +
                     "' (expected sgh|sgs|sgs-es|ch|exact|oracle)");

  std::unique_ptr<bpmstp::SolverBackend> backend;
  if (backend_spec.rfind("external:", 0) == 0)
    backend = bpmstp::make_external_backend(backend_spec.substr(9));
  else if (backend_spec != "builtin")
    throw UsageError("unknown backend '" + backend_spec +
                     "' (expected builtin or external:COMMAND)");

  bpmstp::RunConfig cfg;
  cfg.algorithm = *algo;
  cfg.seed = seed;
  cfg.runs = runs;
  cfg.time_limit_seconds = time_limit;
  cfg.warm_start = warm_start;
  cfg.backend = backend.get();
  cfg.kmax = kmax;

  bpmstp::ExperimentResult res = bpmstp::run_experiment(ins, cfg);
  bpmstp::write_experiment(cfg, res, out_dir);

  bool any_points = false;
  for (const auto& run : res.runs) any_points |= !run.front.empty();
  return any_points ? 0 : 1;
}

int cmd_metrics(const std::string& fronts_glob, const std::string& ref_path,
                const std::vector<double>& ref_point_values,
                const std::string& out) {
  std::vector<std::string> paths = bpmstp::glob_files(fronts_glob);
  if (paths.empty()) {
    std::cerr << "no front files match '" << fronts_glob << "'\n";
    return 1;
  }
  std::vector<bpmstp::Front> fronts;
  for (const std::string& p : paths) fronts.push_back(bpmstp::read_front_csv(p));

  std::vector<bpmstp::Point2> reference =
      ref_path.empty()
          ? bpmstp::to_points(bpmstp::reference_front(fronts))
          : bpmstp::to_points(bpmstp::read_front_csv(ref_path));

  std::optional<bpmstp::Point2> ref_point;
  if (!ref_point_values.empty())
    ref_point = bpmstp::Point2{ref_point_values[0], ref_point_values[1]};

  bpmstp::spit_file(
      out, bpmstp::emit_metrics(paths, fronts, reference, ref_point));
  return 0;
}

int cmd_eaf(const std::string& fronts_glob, const std::string& queries_path,
            const std::string& out) {
  std::vector<std::string> paths = bpmstp::glob_files(fronts_glob);
  if (paths.empty()) {
    std::cerr << "no front files match '" << fronts_glob << "'\n";
    return 1;
  }
  std::vector<std::vector<bpmstp::Point2>> fronts;
  for (const std::string& p : paths)
    fronts.push_back(bpmstp::to_points(bpmstp::read_front_csv(p)));
  std::vector<bpmstp::Point2> queries = bpmstp::read_queries(queries_path);
  bpmstp::spit_file(out, bpmstp::emit_eaf(fronts, queries));
  return 0;
}

int cmd_milp_solve(const std::string& model_path, const std::string& out_path,
                   double time_limit) {
  bpmstp::MilpModel model = bpmstp::import_lp(bpmstp::slurp_file(model_path));
  bpmstp::SolveOptions opt;
  opt.time_limit_seconds = time_limit;
  bpmstp::SolveResult res = bpmstp::make_builtin_backend()->solve(model, opt);

  auto write_values = [&] {
    std::string text;
    char buf[96];
    for (std::size_t v = 0; v < model.vars.size(); ++v) {
      std::snprintf(buf, sizeof buf, "%s %.17g\n", model.vars[v].name.c_str(),
                    res.values[v]);
      text += buf;
    }
    bpmstp::spit_file(out_path, text);
  };

  switch (res.status) {
    case bpmstp::SolveStatus::Optimal:
      write_values();
      return 0;
    case bpmstp::SolveStatus::Infeasible:
      return 1;
    case bpmstp::SolveStatus::TimeLimit:
      if (res.values.empty()) return 4; // nothing usable to hand back
      write_values();
      return 3;
    case bpmstp::SolveStatus::Error:
      break;
  }
  return 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bi-objective scheduling toolkit: minimize makespan and total energy "
      "cost of jobs on identical parallel machines under time-of-use slot "
      "prices."};
  app.require_subcommand(1);

  // generate
  bpmstp::GeneratorParams prm;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "Generate a random instance");
  gen->add_option("--n", prm.n, "Number of jobs")->required();
  gen->add_option("--m", prm.m, "Number of machines")->required();
  gen->add_option("--k", prm.k, "Number of time slots")->required();
  gen->add_option("--p-max", prm.p_max, "Max processing time (default 12)");
  gen->add_option("--u-max", prm.u_max, "Max machine rate (default 6)");
  gen->add_option("--c-max", prm.c_max, "Max slot cost (default 8)");
  gen->add_option("--seed", prm.seed, "Random seed")->required();
  gen->add_option("--out", gen_out, "Output instance file")->required();

  // solve
  std::string algo = "sgs-es", instance_path, backend_spec = "builtin";
  std::string out_dir;
  std::uint64_t seed = 0;
  int runs = 1, kmax = 0;
  double time_limit = 0.0;
  bool warm_start = false;
  CLI::App* solve = app.add_subcommand(
      "solve", "Compute trade-off fronts for an instance file");
  solve->add_option("--algo", algo, "sgh|sgs|sgs-es|ch|exact|oracle")
      ->required();
  solve->add_option("--instance", instance_path, "Instance file")->required();
  solve->add_option("--seed", seed, "Base seed (run r uses seed+r)");
  solve->add_option("--runs", runs, "Repetitions (heuristics only)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--time-limit", time_limit,
                    "Seconds per exact solver call (0 = unlimited)");
  solve->add_flag("--warm-start", warm_start,
                  "Seed each exact level with a greedy schedule");
  solve->add_option("--backend", backend_spec,
                    "builtin or external:COMMAND (exact only)");
  solve->add_option("--kmax", kmax,
                    "First makespan budget of the exact scan (0 = all slots)");
  solve->add_option("--out-dir", out_dir, "Output directory")->required();

  // metrics
  std::string m_fronts, m_ref, m_out;
  std::vector<double> m_ref_point;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Score front CSVs against a reference front");
  metrics->add_option("--fronts", m_fronts, "Front CSV glob ('*' wildcard)")
      ->required();
  metrics->add_option("--ref", m_ref,
                      "Reference front CSV (default: non-dominated union of "
                      "the inputs)");
  metrics
      ->add_option("--ref-point", m_ref_point,
                   "Hypervolume reference point: makespan tec")
      ->expected(2);
  metrics->add_option("--out", m_out, "Output CSV path")->required();

  // eaf
  std::string e_fronts, e_queries, e_out;
  CLI::App* eaf_cmd = app.add_subcommand(
      "eaf", "Attainment fractions of query points over several run fronts");
  eaf_cmd->add_option("--fronts", e_fronts, "Front CSV glob ('*' wildcard)")
      ->required();
  eaf_cmd
      ->add_option("--queries", e_queries,
                   "Query file: one 'makespan tec' pair per line")
      ->required();
  eaf_cmd->add_option("--out", e_out, "Output CSV path")->required();

  // milp-solve (external-backend protocol)
  std::string lp_path, sol_path;
  double milp_limit = 0.0;
  CLI::App* milp = app.add_subcommand(
      "milp-solve",
      "Solve an LP-format model; writes 'name value' lines. Exit 0 optimal, "
      "1 infeasible, 3 time limit (incumbent written), 4 error");
  milp->add_option("model", lp_path, "LP-format model file")->required();
  milp->add_option("solution", sol_path, "Solution output file")->required();
  milp->add_option("--time-limit", milp_limit, "Seconds (0 = unlimited)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(prm, gen_out);
    if (solve->parsed())
      return cmd_solve(instance_path, algo, backend_spec, seed, runs,
                       time_limit, warm_start, kmax, out_dir);
    if (metrics->parsed()) return cmd_metrics(m_fronts, m_ref, m_ref_point, m_out);
    if (eaf_cmd->parsed()) return cmd_eaf(e_fronts, e_queries, e_out);
    if (milp->parsed()) {
      try {
        return cmd_milp_solve(lp_path, sol_path, milp_limit);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4; // protocol error code, not the CLI usage code
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
