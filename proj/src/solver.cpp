#include "bpmstp/solver.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace bpmstp {

namespace {

constexpr double kEps = 1e-6;
const double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Built-in branch-and-bound.
//
// Scope: binary variables plus continuous variables that each appear alone in
// their rows (the energy total and the makespan in our models). Binaries are
// branched in declaration order, 1 before 0; unit-coefficient equality rows
// act as cardinality groups for the lower bound.
// ---------------------------------------------------------------------------

struct ContRowRef {
  int cvar = -1;
  double ccoef = 0.0;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
  std::vector<LinTerm> bin_terms;
};

struct BinRowState {
  RowSense sense;
  double rhs;
  std::vector<LinTerm> terms;
  double min_act = 0.0;
  double max_act = 0.0;
};

class Builtin : public SolverBackend {
 public:
  std::string name() const override { return "builtin"; }

  SolveResult solve(const MilpModel& model, const SolveOptions& opt) override {
    m_ = &model;
    nv_ = (int)model.vars.size();
    deadline_valid_ = opt.time_limit_seconds > 0;
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(opt.time_limit_seconds));
    timed_out_ = false;
    nodes_ = 0;

    prepare();
    SolveResult res;
    if (structurally_bad_) {
      res.status = SolveStatus::Infeasible;
      return res;
    }

    best_obj_ = kInf;
    have_best_ = false;
    if (!opt.warm_start.empty()) try_warm(opt.warm_start);

    // Seed propagation with every row once (catches rows fully pinned by
    // bounds), then search.
    bool root_ok = true;
    for (int r = 0; r < (int)rows_.size() && root_ok; ++r)
      root_ok = examine_row(r);
    root_ok = root_ok && flush_queue();
    if (root_ok) dfs(0);

    res.nodes = nodes_;
    if (timed_out_) {
      res.status = SolveStatus::TimeLimit;
      if (have_best_) {
        res.values = best_values_;
        res.objective = best_obj_;
      }
      return res;
    }
    if (!have_best_) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    res.status = SolveStatus::Optimal;
    res.values = best_values_;
    res.objective = best_obj_;
    res.nodes = nodes_;
    return res;
  }

 private:
  const MilpModel* m_ = nullptr;
  int nv_ = 0;
  bool structurally_bad_ = false;

  std::vector<int8_t> val_;  // -1 unknown, 0, 1 (binaries only)
  std::vector<int8_t> is_bin_;
  std::vector<double> w_;    // objective weight per binary after substitution
  double obj_const_ = 0.0;
  std::vector<double> obj_cont_; // per-var objective coef on continuous vars
  std::vector<BinRowState> rows_;
  std::vector<ContRowRef> cont_rows_;
  std::vector<std::vector<std::pair<int, double>>> rows_of_var_;
  std::vector<int> branch_order_;

  struct Group {
    int rhs = 0;
    int fixed1 = 0;
    std::vector<int> members_by_weight;
  };
  std::vector<Group> groups_;
  std::vector<int> group_of_;

  double obj_fixed_ = 0.0;
  std::vector<int> trail_;
  std::vector<int> queue_;
  std::vector<int8_t> queued_;

  double best_obj_ = kInf;
  bool have_best_ = false;
  std::vector<double> best_values_;

  bool deadline_valid_ = false;
  std::chrono::steady_clock::time_point deadline_;
  bool timed_out_ = false;
  long long nodes_ = 0;

  void prepare() {
    structurally_bad_ = false;
    val_.assign(nv_, -1);
    is_bin_.assign(nv_, 0);
    w_.assign(nv_, 0.0);
    obj_cont_.assign(nv_, 0.0);
    rows_.clear();
    cont_rows_.clear();
    rows_of_var_.assign(nv_, {});
    branch_order_.clear();
    groups_.clear();
    group_of_.assign(nv_, -1);
    obj_fixed_ = 0.0;
    trail_.clear();
    queue_.clear();

    for (int v = 0; v < nv_; ++v) {
      const MilpVar& mv = m_->vars[v];
      if (mv.lb > mv.ub + kEps) {
        structurally_bad_ = true;
        return;
      }
      if (mv.type == VarType::Binary) {
        is_bin_[v] = 1;
        if (mv.ub < 0.5)
          val_[v] = 0;
        else if (mv.lb > 0.5)
          val_[v] = 1;
      }
    }

    for (const LinTerm& t : m_->objective) {
      if (is_bin_[t.var])
        w_[t.var] += t.coef;
      else
        obj_cont_[t.var] += t.coef;
    }
    obj_const_ = m_->objective_constant;

    // Split rows by how many continuous variables they touch.
    std::vector<int> subst_row_of(nv_, -1);
    for (const MilpRow& r : m_->rows) {
      int cvar = -1;
      bool multi = false;
      for (const LinTerm& t : r.terms)
        if (!is_bin_[t.var]) {
          if (cvar != -1 && cvar != t.var) multi = true;
          cvar = t.var;
        }
      if (multi)
        throw std::invalid_argument(
            "builtin backend: row '" + r.name +
            "' couples several continuous variables; unsupported");
      if (cvar < 0) {
        BinRowState s;
        s.sense = r.sense;
        s.rhs = r.rhs;
        s.terms = r.terms;
        rows_.push_back(std::move(s));
      } else {
        ContRowRef c;
        c.cvar = cvar;
        c.sense = r.sense;
        c.rhs = r.rhs;
        for (const LinTerm& t : r.terms) {
          if (t.var == cvar)
            c.ccoef += t.coef;
          else
            c.bin_terms.push_back(t);
        }
        if (std::fabs(c.ccoef) < kEps)
          throw std::invalid_argument("builtin backend: row '" + r.name +
                                      "' has a zero continuous coefficient");
        if (r.sense == RowSense::EQ && subst_row_of[cvar] == -1)
          subst_row_of[cvar] = (int)cont_rows_.size();
        cont_rows_.push_back(std::move(c));
      }
    }

    // Fold objective terms on defined continuous variables into the binary
    // objective: from  c*v + sum a_i x_i = rhs  follows
    // v = (rhs - sum a_i x_i) / c.
    for (int v = 0; v < nv_; ++v) {
      if (obj_cont_[v] == 0.0 || subst_row_of[v] < 0) continue;
      const ContRowRef& row = cont_rows_[subst_row_of[v]];
      double wv = obj_cont_[v];
      obj_const_ += wv * row.rhs / row.ccoef;
      for (const LinTerm& t : row.bin_terms)
        w_[t.var] -= wv * t.coef / row.ccoef;
      obj_cont_[v] = 0.0;
    }
    for (int v = 0; v < nv_; ++v)
      if (!is_bin_[v] && obj_cont_[v] != 0.0 && !std::isfinite(m_->vars[v].lb) &&
          obj_cont_[v] > 0)
        throw std::invalid_argument(
            "builtin backend: unbounded continuous objective variable");

    for (int r = 0; r < (int)rows_.size(); ++r) {
      BinRowState& row = rows_[r];
      row.min_act = 0.0;
      row.max_act = 0.0;
      for (const LinTerm& t : row.terms) {
        rows_of_var_[t.var].push_back({r, t.coef});
        if (val_[t.var] == -1) {
          row.min_act += std::min(0.0, t.coef);
          row.max_act += std::max(0.0, t.coef);
        } else if (val_[t.var] == 1) {
          row.min_act += t.coef;
          row.max_act += t.coef;
        }
      }
    }

    // Cardinality groups: unit-coefficient equality rows over disjoint
    // binaries with a non-negative integral right side.
    for (const BinRowState& row : rows_) {
      if (row.sense != RowSense::EQ) continue;
      double r = row.rhs;
      if (r < -kEps || std::fabs(r - std::round(r)) > kEps) continue;
      bool unit = true;
      for (const LinTerm& t : row.terms)
        if (std::fabs(t.coef - 1.0) > kEps || group_of_[t.var] != -1) {
          unit = false;
          break;
        }
      if (!unit) continue;
      Group g;
      g.rhs = (int)std::llround(r);
      for (const LinTerm& t : row.terms) {
        group_of_[t.var] = (int)groups_.size();
        if (val_[t.var] == 1) ++g.fixed1;
        if (val_[t.var] == -1) g.members_by_weight.push_back(t.var);
      }
      std::sort(g.members_by_weight.begin(), g.members_by_weight.end(),
                [&](int a, int b) {
                  if (w_[a] != w_[b]) return w_[a] < w_[b];
                  return a < b;
                });
      groups_.push_back(std::move(g));
    }

    for (int v = 0; v < nv_; ++v) {
      if (!is_bin_[v]) continue;
      if (val_[v] == 1) obj_fixed_ += w_[v];
      if (val_[v] == -1) branch_order_.push_back(v);
    }
    queued_.assign(rows_.size(), 0);
  }

  // --- propagation ---------------------------------------------------------

  bool fix(int v, int8_t b) {
    val_[v] = b;
    trail_.push_back(v);
    if (b == 1) {
      obj_fixed_ += w_[v];
      if (group_of_[v] >= 0) ++groups_[group_of_[v]].fixed1;
    }
    for (auto [r, a] : rows_of_var_[v]) {
      BinRowState& row = rows_[r];
      row.min_act += (b == 1 ? a : 0.0) - std::min(0.0, a);
      row.max_act += (b == 1 ? a : 0.0) - std::max(0.0, a);
      if (!queued_[r]) {
        queued_[r] = 1;
        queue_.push_back(r);
      }
    }
    return true;
  }

  void unfix(int v) {
    if (val_[v] == 1) {
      obj_fixed_ -= w_[v];
      if (group_of_[v] >= 0) --groups_[group_of_[v]].fixed1;
    }
    for (auto [r, a] : rows_of_var_[v]) {
      BinRowState& row = rows_[r];
      row.min_act += std::min(0.0, a) - (val_[v] == 1 ? a : 0.0);
      row.max_act += std::max(0.0, a) - (val_[v] == 1 ? a : 0.0);
    }
    val_[v] = -1;
  }

  bool examine_row(int r) {
    BinRowState& row = rows_[r];
    bool looks_le = row.sense != RowSense::GE; // LE or EQ
    bool looks_ge = row.sense != RowSense::LE; // GE or EQ
    if (looks_le && row.min_act > row.rhs + kEps) return false;
    if (looks_ge && row.max_act < row.rhs - kEps) return false;
    for (const LinTerm& t : row.terms) {
      if (val_[t.var] != -1) continue;
      double a = t.coef;
      if (looks_le) {
        if (a > 0 && row.min_act + a > row.rhs + kEps) {
          if (!fix(t.var, 0)) return false;
          continue;
        }
        if (a < 0 && row.min_act - a > row.rhs + kEps)
          if (!fix(t.var, 1)) return false;
      }
      if (val_[t.var] != -1) continue;
      if (looks_ge) {
        if (a < 0 && row.max_act + a < row.rhs - kEps) {
          if (!fix(t.var, 0)) return false;
          continue;
        }
        if (a > 0 && row.max_act - a < row.rhs - kEps)
          if (!fix(t.var, 1)) return false;
      }
    }
    return true;
  }

  bool flush_queue() {
    while (!queue_.empty()) {
      int r = queue_.back();
      queue_.pop_back();
      queued_[r] = 0;
      if (!examine_row(r)) {
        for (int q : queue_) queued_[q] = 0;
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  bool fix_and_propagate(int v, int8_t b) {
    fix(v, b);
    return flush_queue();
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      unfix(trail_.back());
      trail_.pop_back();
    }
  }

  // --- bounding ------------------------------------------------------------

  double lower_bound() {
    double lb = obj_const_ + obj_fixed_;
    for (const Group& g : groups_) {
      int need = g.rhs - g.fixed1;
      if (need < 0) return kInf;
      if (need == 0) continue;
      int taken = 0;
      double sum = 0.0;
      for (int v : g.members_by_weight) {
        if (val_[v] != -1) continue;
        sum += w_[v];
        if (++taken == need) break;
      }
      if (taken < need) return kInf;
      lb += sum;
    }
    for (int v : branch_order_)
      if (val_[v] == -1 && group_of_[v] == -1 && w_[v] < 0) lb += w_[v];
    return lb;
  }

  // --- leaves --------------------------------------------------------------

  void try_leaf() {
    std::vector<double> cont_lo(nv_), cont_hi(nv_);
    for (int v = 0; v < nv_; ++v) {
      cont_lo[v] = m_->vars[v].lb;
      cont_hi[v] = m_->vars[v].ub;
    }
    for (const ContRowRef& c : cont_rows_) {
      double act = 0.0;
      for (const LinTerm& t : c.bin_terms)
        if (val_[t.var] == 1) act += t.coef;
      double bound = (c.rhs - act) / c.ccoef;
      bool upper = (c.sense == RowSense::LE) == (c.ccoef > 0);
      if (c.sense == RowSense::EQ) {
        cont_lo[c.cvar] = std::max(cont_lo[c.cvar], bound);
        cont_hi[c.cvar] = std::min(cont_hi[c.cvar], bound);
      } else if (upper) {
        cont_hi[c.cvar] = std::min(cont_hi[c.cvar], bound);
      } else {
        cont_lo[c.cvar] = std::max(cont_lo[c.cvar], bound);
      }
    }
    double obj = obj_const_ + obj_fixed_;
    std::vector<double> values(nv_, 0.0);
    for (int v = 0; v < nv_; ++v) {
      if (is_bin_[v]) {
        values[v] = (val_[v] == 1) ? 1.0 : 0.0;
        continue;
      }
      if (cont_lo[v] > cont_hi[v] + kEps) return; // no feasible completion
      double x;
      if (obj_cont_[v] > 0)
        x = cont_lo[v];
      else if (obj_cont_[v] < 0)
        x = cont_hi[v];
      else
        x = std::isfinite(cont_lo[v]) ? cont_lo[v]
                                      : std::min(cont_hi[v], 0.0);
      values[v] = x;
      obj += obj_cont_[v] * x;
    }
    if (obj < best_obj_ - 1e-12) {
      best_obj_ = obj;
      best_values_ = std::move(values);
      have_best_ = true;
    }
  }

  void dfs(std::size_t pos) {
    if (timed_out_) return;
    if ((++nodes_ & 1023) == 0 && deadline_valid_ &&
        std::chrono::steady_clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (lower_bound() >= best_obj_ - 1e-9) return;
    while (pos < branch_order_.size() && val_[branch_order_[pos]] != -1) ++pos;
    if (pos == branch_order_.size()) {
      try_leaf();
      return;
    }
    int v = branch_order_[pos];
    for (int8_t b : {(int8_t)1, (int8_t)0}) {
      std::size_t mark = trail_.size();
      if (fix_and_propagate(v, b)) dfs(pos + 1);
      undo_to(mark);
      if (timed_out_) return;
    }
  }

  // --- warm start ----------------------------------------------------------

  void try_warm(const std::vector<std::pair<int, double>>& warm) {
    std::vector<int8_t> assign(nv_, 0);
    for (int v = 0; v < nv_; ++v)
      if (is_bin_[v] && val_[v] == 1) assign[v] = 1;
    for (auto [v, x] : warm) {
      if (v < 0 || v >= nv_ || !is_bin_[v]) return; // not usable, ignore
      assign[v] = (x > 0.5) ? 1 : 0;
    }
    for (int v = 0; v < nv_; ++v) {
      if (!is_bin_[v] || val_[v] == -1) continue;
      if (assign[v] != val_[v]) return; // contradicts a pinned variable
    }
    // Check the all-binary rows directly.
    for (const BinRowState& row : rows_) {
      double act = 0.0;
      for (const LinTerm& t : row.terms) act += t.coef * assign[t.var];
      if (row.sense != RowSense::GE && act > row.rhs + kEps) return;
      if (row.sense != RowSense::LE && act < row.rhs - kEps) return;
    }
    // Resolve continuous variables exactly as a leaf would.
    std::vector<double> cont_lo(nv_), cont_hi(nv_);
    for (int v = 0; v < nv_; ++v) {
      cont_lo[v] = m_->vars[v].lb;
      cont_hi[v] = m_->vars[v].ub;
    }
    for (const ContRowRef& c : cont_rows_) {
      double act = 0.0;
      for (const LinTerm& t : c.bin_terms) act += t.coef * assign[t.var];
      double bound = (c.rhs - act) / c.ccoef;
      bool upper = (c.sense == RowSense::LE) == (c.ccoef > 0);
      if (c.sense == RowSense::EQ) {
        cont_lo[c.cvar] = std::max(cont_lo[c.cvar], bound);
        cont_hi[c.cvar] = std::min(cont_hi[c.cvar], bound);
      } else if (upper) {
        cont_hi[c.cvar] = std::min(cont_hi[c.cvar], bound);
      } else {
        cont_lo[c.cvar] = std::max(cont_lo[c.cvar], bound);
      }
    }
    double obj = obj_const_;
    std::vector<double> values(nv_, 0.0);
    for (int v = 0; v < nv_; ++v) {
      if (is_bin_[v]) {
        values[v] = assign[v];
        obj += w_[v] * assign[v];
        continue;
      }
      if (cont_lo[v] > cont_hi[v] + kEps) return;
      double x = (obj_cont_[v] > 0)   ? cont_lo[v]
                 : (obj_cont_[v] < 0) ? cont_hi[v]
                 : std::isfinite(cont_lo[v]) ? cont_lo[v]
                                             : std::min(cont_hi[v], 0.0);
      values[v] = x;
      obj += obj_cont_[v] * x;
    }
    best_obj_ = obj;
    best_values_ = std::move(values);
    have_best_ = true;
  }
};

// ---------------------------------------------------------------------------
// External process backend.
// ---------------------------------------------------------------------------

class External : public SolverBackend {
 public:
  explicit External(std::string cmd) : cmd_(std::move(cmd)) {}

  std::string name() const override { return "external:" + cmd_; }

  SolveResult solve(const MilpModel& model, const SolveOptions&) override {
    namespace fs = std::filesystem;
    static int counter = 0;
    std::string tag = std::to_string((long long)::getpid()) + "_" +
                      std::to_string(counter++);
    fs::path lp = fs::temp_directory_path() / ("bpmstp_model_" + tag + ".lp");
    fs::path sol = fs::temp_directory_path() / ("bpmstp_sol_" + tag + ".txt");
    {
      std::ofstream out(lp);
      out << export_lp(model);
      if (!out) throw std::runtime_error("external backend: cannot write " +
                                         lp.string());
    }
    std::string cmdline =
        cmd_ + " '" + lp.string() + "' '" + sol.string() + "'";
    int raw = std::system(cmdline.c_str());
    int code = -1;
    if (raw != -1 && WIFEXITED(raw)) code = WEXITSTATUS(raw);

    SolveResult res;
    if (code == 1) {
      res.status = SolveStatus::Infeasible;
    } else if (code == 0 || code == 3) {
      res.status = (code == 0) ? SolveStatus::Optimal : SolveStatus::TimeLimit;
      res.values.assign(model.vars.size(), 0.0);
      std::ifstream in(sol);
      if (!in) {
        res.status = SolveStatus::Error;
      } else {
        std::string name;
        double value;
        while (in >> name >> value) {
          int v = model.find_var(name);
          if (v >= 0) res.values[v] = value; // unknown names are fine
        }
        res.objective = model.objective_constant;
        for (const LinTerm& t : model.objective)
          res.objective += t.coef * res.values[t.var];
      }
    } else {
      res.status = SolveStatus::Error;
    }
    std::error_code ec;
    fs::remove(lp, ec);
    fs::remove(sol, ec);
    return res;
  }

 private:
  std::string cmd_;
};

} // namespace

std::unique_ptr<SolverBackend> make_builtin_backend() {
  return std::make_unique<Builtin>();
}

std::unique_ptr<SolverBackend> make_external_backend(std::string command) {
  return std::make_unique<External>(std::move(command));
}

} // namespace bpmstp
