#include "bpmstp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "bpmstp/heuristics.hpp"
#include "bpmstp/io.hpp"
#include "bpmstp/rng.hpp"

namespace bpmstp {

Instance generate_instance(const GeneratorParams& prm) {
  if (prm.n < 1 || prm.m < 1 || prm.k < 1)
    throw std::invalid_argument("generate_instance: n, m, k must be positive");
  if (prm.p_max < 1 || prm.u_max < 1 || prm.c_max < 1)
    throw std::invalid_argument(
        "generate_instance: p_max, u_max, c_max must be positive");
  if (prm.p_max > prm.k)
    throw std::invalid_argument(
        "generate_instance: p_max exceeds the horizon, jobs could not fit");

  Rng rng(prm.seed);
  Instance ins;
  ins.n_jobs = prm.n;
  ins.n_machines = prm.m;
  ins.n_slots = prm.k;
  for (int i = 0; i < prm.n; ++i)
    ins.processing_times.push_back((int)rng.uniform_int(1, prm.p_max));
  for (int i = 0; i < prm.m; ++i)
    ins.consumption_rates.push_back((double)rng.uniform_int(1, prm.u_max));
  for (int i = 0; i < prm.k; ++i)
    ins.slot_costs.push_back((double)rng.uniform_int(1, prm.c_max));
  ins.validate();
  return ins;
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sgh: return "sgh";
    case Algorithm::Sgs: return "sgs";
    case Algorithm::SgsEs: return "sgs-es";
    case Algorithm::Ch: return "ch";
    case Algorithm::Exact: return "exact";
    case Algorithm::Oracle: return "oracle";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::Sgh, Algorithm::Sgs, Algorithm::SgsEs,
                      Algorithm::Ch, Algorithm::Exact, Algorithm::Oracle})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

namespace {

RunOutcome run_once(const Instance& ins, const RunConfig& cfg,
                    std::uint64_t seed) {
  RunOutcome out;
  out.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  switch (cfg.algorithm) {
    case Algorithm::Sgh: {
      Rng rng(seed);
      std::vector<FrontPoint> pts;
      if (auto fs = sgh(ins, rng))
        pts.push_back(FrontPoint{evaluate(ins, *fs), *fs, true, 0});
      out.front = pareto_filter(std::move(pts));
      break;
    }
    case Algorithm::Sgs:
      out.front = sgs(ins, seed);
      break;
    case Algorithm::SgsEs:
      out.front = sgs_es(ins, seed);
      break;
    case Algorithm::Ch:
      out.front = ch_j(ins, seed);
      break;
    case Algorithm::Exact: {
      ExactOptions opt;
      opt.warm_start = cfg.warm_start;
      opt.seed = (unsigned)seed;
      opt.time_limit_seconds = cfg.time_limit_seconds;
      opt.backend = cfg.backend;
      opt.kmax = cfg.kmax;
      ExactResult r = exact_pareto(ins, opt);
      out.front = std::move(r.front);
      out.truncated = r.truncated;
      out.levels = std::move(r.levels);
      break;
    }
    case Algorithm::Oracle:
      out.front = oracle_pareto(ins);
      break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  return out;
}

} // namespace

ExperimentResult run_experiment(const Instance& ins, const RunConfig& cfg) {
  if (cfg.runs < 1)
    throw std::invalid_argument("run_experiment: runs must be >= 1");
  ins.validate();
  ExperimentResult res;
  bool single = cfg.algorithm == Algorithm::Exact ||
                cfg.algorithm == Algorithm::Oracle;
  int runs = single ? 1 : cfg.runs;
  for (int r = 0; r < runs; ++r)
    res.runs.push_back(run_once(ins, cfg, cfg.seed + (std::uint64_t)r));
  return res;
}

void write_experiment(const RunConfig& cfg, const ExperimentResult& res,
                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::ostringstream summary;
  summary << "run,algorithm,seed,points,seconds,truncated\n";
  for (std::size_t r = 0; r < res.runs.size(); ++r) {
    const RunOutcome& run = res.runs[r];
    std::string stem = "front_run" + std::to_string(r);
    write_front_csv(run.front, (fs::path(out_dir) / (stem + ".csv")).string());

    // Sidecars follow the CSV's row order: ascending makespan.
    std::vector<const FrontPoint*> rows;
    for (const FrontPoint& p : run.front.points) rows.push_back(&p);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const FrontPoint* a, const FrontPoint* b) {
                       return a->obj.makespan < b->obj.makespan;
                     });
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i]->schedule)
        write_schedule(*rows[i]->schedule,
                       (fs::path(out_dir) /
                        (stem + "_p" + std::to_string(i) + ".sched"))
                           .string());

    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%s,%llu,%zu,%.3f,%d\n", r,
                  to_string(cfg.algorithm), (unsigned long long)run.seed,
                  run.front.size(), run.seconds, run.truncated ? 1 : 0);
    summary << buf;
  }
  spit_file((fs::path(out_dir) / "summary.csv").string(), summary.str());
}

namespace {

void append_cell(std::string& row, const std::optional<double>& v) {
  row += ',';
  if (v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    row += buf;
  }
}

} // namespace

std::string emit_metrics(const std::vector<std::string>& labels,
                         const std::vector<Front>& fronts,
                         const std::vector<Point2>& reference,
                         std::optional<Point2> reference_point, int n_jobs) {
  if (fronts.empty())
    throw std::invalid_argument("emit_metrics: no fronts");
  if (labels.size() != fronts.size())
    throw std::invalid_argument("emit_metrics: one label per front required");

  const char* columns[] = {"hypervolume", "purity", "d_r",
                           "spacing",     "spread", "fm1",
                           "fm2"};
  std::string out = "front,points";
  for (const char* c : columns) out += std::string(",") + c;
  out += '\n';

  std::vector<double> sums(std::size(columns), 0.0);
  std::vector<int> counts(std::size(columns), 0);
  for (std::size_t i = 0; i < fronts.size(); ++i) {
    MetricReport rep =
        score_front(fronts[i], reference, reference_point, n_jobs);
    const std::optional<double> cells[] = {rep.hypervolume, rep.purity,
                                           rep.d_r,         rep.spacing,
                                           rep.spread,      rep.fm1,
                                           rep.fm2};
    std::string row = labels[i] + "," + std::to_string(fronts[i].size());
    for (std::size_t c = 0; c < std::size(columns); ++c) {
      append_cell(row, cells[c]);
      if (cells[c]) {
        sums[c] += *cells[c];
        ++counts[c];
      }
    }
    out += row + '\n';
  }

  double mean_points = 0.0;
  for (const Front& f : fronts) mean_points += (double)f.size();
  mean_points /= (double)fronts.size();
  std::string row = "average";
  {
    char buf[48];
    std::snprintf(buf, sizeof buf, ",%.6f", mean_points);
    row += buf;
  }
  for (std::size_t c = 0; c < std::size(columns); ++c)
    append_cell(row, counts[c] ? std::optional<double>(sums[c] / counts[c])
                               : std::nullopt);
  out += row + '\n';
  return out;
}

std::string emit_eaf(const std::vector<std::vector<Point2>>& fronts,
                     const std::vector<Point2>& queries) {
  std::vector<double> fractions = eaf(fronts, queries);
  std::string out = "makespan,tec,fraction\n";
  char buf[96];
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", queries[i].x,
                  queries[i].y, fractions[i]);
    out += buf;
  }
  return out;
}

} // namespace bpmstp
