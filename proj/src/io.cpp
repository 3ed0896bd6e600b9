#include "bpmstp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bpmstp {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

// Canonical real: integers without a decimal point, everything else with
// enough digits to round-trip.
std::string fmt_real(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", (long long)v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct DataLine {
  int number = 0; // 1-based line number in the source text
  std::vector<std::string> tokens;
};

// Lines with content after comment stripping, tokenized on whitespace.
std::vector<DataLine> data_lines(const std::string& text) {
  std::vector<DataLine> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
    std::istringstream ls(raw);
    DataLine dl;
    dl.number = number;
    std::string tok;
    while (ls >> tok) dl.tokens.push_back(tok);
    if (!dl.tokens.empty()) out.push_back(std::move(dl));
  }
  return out;
}

long long parse_int_tok(const DataLine& dl, std::size_t i) {
  const std::string& tok = dl.tokens[i];
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    fail(dl.number, "expected an integer, got '" + tok + "'");
  return v;
}

double parse_real_tok(const DataLine& dl, std::size_t i) {
  const std::string& tok = dl.tokens[i];
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    fail(dl.number, "expected a number, got '" + tok + "'");
  return v;
}

} // namespace

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// --- instances -------------------------------------------------------------

Instance parse_instance(const std::string& text) {
  std::vector<DataLine> lines = data_lines(text);
  if (lines.size() != 4)
    throw std::invalid_argument(
        "instance file must have exactly 4 data lines (sizes, processing "
        "times, rates, slot costs); found " +
        std::to_string(lines.size()));

  const DataLine& head = lines[0];
  if (head.tokens.size() != 3)
    fail(head.number, "expected 'N M K', got " +
                          std::to_string(head.tokens.size()) + " tokens");
  long long n = parse_int_tok(head, 0);
  long long m = parse_int_tok(head, 1);
  long long k = parse_int_tok(head, 2);
  if (n < 1 || m < 1 || k < 1) fail(head.number, "N, M, K must be positive");
  if (n > 1000000 || m > 1000000 || k > 1000000)
    fail(head.number, "size out of supported range");

  Instance ins;
  ins.n_jobs = (int)n;
  ins.n_machines = (int)m;
  ins.n_slots = (int)k;

  const DataLine& pl = lines[1];
  if ((long long)pl.tokens.size() != n)
    fail(pl.number, "expected " + std::to_string(n) +
                        " processing times, got " +
                        std::to_string(pl.tokens.size()));
  for (std::size_t i = 0; i < pl.tokens.size(); ++i) {
    long long p = parse_int_tok(pl, i);
    if (p < 1 || p > k)
      fail(pl.number, "processing time " + std::to_string(p) +
                          " outside [1, " + std::to_string(k) + "]");
    ins.processing_times.push_back((int)p);
  }

  const DataLine& ul = lines[2];
  if ((long long)ul.tokens.size() != m)
    fail(ul.number, "expected " + std::to_string(m) + " machine rates, got " +
                        std::to_string(ul.tokens.size()));
  for (std::size_t i = 0; i < ul.tokens.size(); ++i) {
    double u = parse_real_tok(ul, i);
    if (!(u >= 0.0)) fail(ul.number, "machine rate must be non-negative");
    ins.consumption_rates.push_back(u);
  }

  const DataLine& cl = lines[3];
  if ((long long)cl.tokens.size() != k)
    fail(cl.number, "expected " + std::to_string(k) + " slot costs, got " +
                        std::to_string(cl.tokens.size()));
  for (std::size_t i = 0; i < cl.tokens.size(); ++i) {
    double c = parse_real_tok(cl, i);
    if (!(c >= 0.0)) fail(cl.number, "slot cost must be non-negative");
    ins.slot_costs.push_back(c);
  }

  ins.validate();
  return ins;
}

Instance read_instance(const std::string& path) {
  try {
    return parse_instance(slurp_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string format_instance(const Instance& ins) {
  std::ostringstream out;
  out << ins.n_jobs << ' ' << ins.n_machines << ' ' << ins.n_slots << '\n';
  for (int i = 0; i < ins.n_jobs; ++i)
    out << (i ? " " : "") << ins.processing_times[i];
  out << '\n';
  for (int i = 0; i < ins.n_machines; ++i)
    out << (i ? " " : "") << fmt_real(ins.consumption_rates[i]);
  out << '\n';
  for (int i = 0; i < ins.n_slots; ++i)
    out << (i ? " " : "") << fmt_real(ins.slot_costs[i]);
  out << '\n';
  return out.str();
}

void write_instance(const Instance& ins, const std::string& path) {
  spit_file(path, format_instance(ins));
}

// --- fronts ------------------------------------------------------------------

std::string format_front_csv(const Front& f) {
  std::vector<const FrontPoint*> rows;
  for (const FrontPoint& p : f.points) rows.push_back(&p);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const FrontPoint* a, const FrontPoint* b) {
                     return a->obj.makespan < b->obj.makespan;
                   });
  std::ostringstream out;
  out << "makespan,tec\n";
  char buf[64];
  for (const FrontPoint* p : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", p->obj.makespan, p->obj.tec);
    out << buf;
  }
  return out.str();
}

void write_front_csv(const Front& f, const std::string& path) {
  spit_file(path, format_front_csv(f));
}

Front read_front_csv(const std::string& path) {
  std::string text = slurp_file(path);
  std::istringstream in(text);
  std::string line;
  int number = 0;
  Front f;
  bool saw_header = false;
  try {
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (!saw_header) {
        if (line != "makespan,tec")
          fail(number, "expected header 'makespan,tec', got '" + line + "'");
        saw_header = true;
        continue;
      }
      auto comma = line.find(',');
      if (comma == std::string::npos) fail(number, "expected 'makespan,tec'");
      DataLine dl;
      dl.number = number;
      dl.tokens = {line.substr(0, comma), line.substr(comma + 1)};
      FrontPoint p;
      p.obj.makespan = (int)parse_int_tok(dl, 0);
      p.obj.tec = parse_real_tok(dl, 1);
      f.points.push_back(std::move(p));
    }
    if (!saw_header) fail(number, "missing 'makespan,tec' header");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return f;
}

// --- schedules ---------------------------------------------------------------

std::string format_schedule(const FeasibleSchedule& s) {
  std::ostringstream out;
  out << "# job machine start\n";
  for (std::size_t j = 0; j < s.jobs.size(); ++j)
    out << (j + 1) << ' ' << (s.jobs[j].machine + 1) << ' ' << s.jobs[j].start
        << '\n';
  return out.str();
}

void write_schedule(const FeasibleSchedule& s, const std::string& path) {
  spit_file(path, format_schedule(s));
}

FeasibleSchedule read_schedule(const std::string& path) {
  std::vector<DataLine> lines;
  try {
    lines = data_lines(slurp_file(path));
    FeasibleSchedule s;
    s.jobs.resize(lines.size());
    std::vector<bool> seen(lines.size(), false);
    for (const DataLine& dl : lines) {
      if (dl.tokens.size() != 3)
        fail(dl.number, "expected 'job machine start'");
      long long j = parse_int_tok(dl, 0);
      long long h = parse_int_tok(dl, 1);
      long long t = parse_int_tok(dl, 2);
      if (j < 1 || j > (long long)lines.size())
        fail(dl.number, "job id " + std::to_string(j) + " outside [1, " +
                            std::to_string(lines.size()) + "]");
      if (seen[j - 1]) fail(dl.number, "duplicate job " + std::to_string(j));
      if (h < 1) fail(dl.number, "machine must be >= 1");
      if (t < 1) fail(dl.number, "start slot must be >= 1");
      seen[j - 1] = true;
      s.jobs[j - 1] = {(int)h - 1, (int)t};
    }
    return s;
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

// --- queries -------------------------------------------------------------------

std::vector<Point2> read_queries(const std::string& path) {
  try {
    std::vector<Point2> out;
    for (const DataLine& dl : data_lines(slurp_file(path))) {
      if (dl.tokens.size() != 2)
        fail(dl.number, "expected 'makespan tec' pair");
      out.push_back({parse_real_tok(dl, 0), parse_real_tok(dl, 1)});
    }
    return out;
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

// --- globbing --------------------------------------------------------------------

namespace {

bool wildcard_match(const std::string& pat, const std::string& s) {
  // Iterative '*' matcher (no other metacharacters).
  std::size_t pi = 0, si = 0, star = std::string::npos, mark = 0;
  while (si < s.size()) {
    if (pi < pat.size() && (pat[pi] == s[si])) {
      ++pi;
      ++si;
    } else if (pi < pat.size() && pat[pi] == '*') {
      star = pi++;
      mark = si;
    } else if (star != std::string::npos) {
      pi = star + 1;
      si = ++mark;
    } else {
      return false;
    }
  }
  while (pi < pat.size() && pat[pi] == '*') ++pi;
  return pi == pat.size();
}

} // namespace

std::vector<std::string> glob_files(const std::string& pattern) {
  namespace fs = std::filesystem;
  fs::path p(pattern);
  std::string base = p.filename().string();
  fs::path dir = p.parent_path();
  if (dir.empty()) dir = ".";

  std::vector<std::string> out;
  if (base.find('*') == std::string::npos) {
    if (fs::is_regular_file(p)) out.push_back(p.string());
    return out;
  }
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (wildcard_match(base, name)) out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace bpmstp
