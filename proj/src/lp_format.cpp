#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "bpmstp/milp.hpp"

namespace bpmstp {

namespace {

// Integral values print as integers, everything else with full round-trip
// precision; either way the same double always yields the same bytes.
std::string fmt_num(double x) {
  if (std::floor(x) == x && std::fabs(x) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", (long long)x);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void append_terms(std::ostringstream& out, const MilpModel& m,
                  const std::vector<LinTerm>& terms) {
  int on_line = 0;
  for (const auto& t : terms) {
    double c = t.coef;
    out << (c < 0 ? " - " : " + ") << fmt_num(std::fabs(c)) << ' '
        << m.vars[t.var].name;
    if (++on_line == 8) {
      out << "\n  ";
      on_line = 0;
    }
  }
}

} // namespace

std::string export_lp(const MilpModel& m) {
  if (m.objective_constant != 0.0)
    throw std::invalid_argument(
        "export_lp: objective constants are not representable");
  std::ostringstream out;
  out << "\\ family=" << (m.family.empty() ? "unknown" : m.family)
      << " horizon=" << m.horizon << " reduced=" << (m.reduced ? 1 : 0)
      << "\n";
  out << "Minimize\n obj:";
  append_terms(out, m, m.objective);
  out << "\nSubject To\n";
  for (const auto& r : m.rows) {
    out << ' ' << r.name << ':';
    append_terms(out, m, r.terms);
    switch (r.sense) {
      case RowSense::LE: out << " <= "; break;
      case RowSense::EQ: out << " = "; break;
      case RowSense::GE: out << " >= "; break;
    }
    out << fmt_num(r.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.type == VarType::Binary) {
      // Only pinned binaries need a line; the section below declares 0/1.
      if (v.ub == 0.0) out << ' ' << v.name << " = 0\n";
      continue;
    }
    bool up = std::isfinite(v.ub);
    if (v.lb == 0.0 && !up) {
      out << ' ' << v.name << " >= 0\n";
    } else if (up) {
      out << ' ' << fmt_num(v.lb) << " <= " << v.name << " <= " << fmt_num(v.ub)
          << "\n";
    } else {
      out << ' ' << v.name << " >= " << fmt_num(v.lb) << "\n";
    }
  }
  out << "Binaries\n";
  int on_line = 0;
  for (const auto& v : m.vars) {
    if (v.type != VarType::Binary) continue;
    out << ' ' << v.name;
    if (++on_line == 8) {
      out << "\n";
      on_line = 0;
    }
  }
  if (on_line) out << "\n";
  out << "End\n";
  return out.str();
}

namespace {

struct Token {
  std::string text;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::invalid_argument("lp parse error at line " + std::to_string(line) +
                              ": " + what);
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  bool digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit((unsigned char)c)) {
      digit = true;
    } else if (c != '.' && c != 'e' && c != 'E' && c != '+' && c != '-') {
      return false;
    }
  }
  return digit;
}

std::string lower(std::string s) {
  for (char& c : s) c = (char)std::tolower((unsigned char)c);
  return s;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> toks;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::size_t bs = line.find('\\'); // comment until end of line
    if (bs != std::string::npos) line.resize(bs);
    std::istringstream ls(line);
    std::string w;
    while (ls >> w) {
      // Detach a trailing colon so "name:" splits into two tokens.
      if (w.size() > 1 && w.back() == ':') {
        toks.push_back({w.substr(0, w.size() - 1), ln});
        toks.push_back({":", ln});
      } else {
        toks.push_back({w, ln});
      }
    }
  }
  return toks;
}

} // namespace

MilpModel import_lp(const std::string& text) {
  std::vector<Token> toks = tokenize(text);
  std::size_t i = 0;
  auto peek = [&]() -> const Token* { return i < toks.size() ? &toks[i] : nullptr; };

  MilpModel m;
  m.family = "imported";
  std::unordered_map<std::string, int> var_of;
  auto var_id = [&](const std::string& name) {
    auto it = var_of.find(name);
    if (it != var_of.end()) return it->second;
    int id = (int)m.vars.size();
    m.vars.push_back(
        {name, VarType::Continuous, 0.0, std::numeric_limits<double>::infinity()});
    m.start_keys.push_back({-1, -1, -1});
    var_of[name] = id;
    return id;
  };

  auto is_keyword = [&](const std::string& t) {
    std::string k = lower(t);
    return k == "minimize" || k == "maximize" || k == "min" || k == "max" ||
           k == "subject" || k == "st" || k == "s.t." || k == "bounds" ||
           k == "binaries" || k == "binary" || k == "bin" || k == "end" ||
           k == "general" || k == "generals" || k == "gen";
  };
  auto is_sense = [](const std::string& t) {
    return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">";
  };

  // Reads "[sign] [number] name" repeatedly; stops at a sense token or a
  // section keyword. Duplicate variables are merged.
  auto read_terms = [&](std::vector<LinTerm>& out) {
    std::unordered_map<int, std::size_t> seen;
    while (const Token* t = peek()) {
      if (is_sense(t->text) || is_keyword(t->text)) return;
      double sign = 1.0;
      if (t->text == "+" || t->text == "-") {
        sign = (t->text == "-") ? -1.0 : 1.0;
        ++i;
        t = peek();
        if (!t) parse_fail(toks.back().line, "dangling sign");
      }
      double coef = sign;
      if (is_number(t->text)) {
        coef = sign * std::stod(t->text);
        ++i;
        t = peek();
        if (!t) parse_fail(toks.back().line, "coefficient without a variable");
      }
      if (is_sense(t->text) || is_keyword(t->text) || t->text == ":")
        parse_fail(t->line, "expected a variable name, got '" + t->text + "'");
      int v = var_id(t->text);
      ++i;
      auto it = seen.find(v);
      if (it != seen.end())
        out[it->second].coef += coef;
      else {
        seen[v] = out.size();
        out.push_back({v, coef});
      }
    }
  };

  auto read_number = [&]() {
    const Token* t = peek();
    if (!t || !is_number(t->text))
      parse_fail(t ? t->line : (toks.empty() ? 0 : toks.back().line),
                 "expected a number");
    ++i;
    return std::stod(t->text);
  };

  // Objective section.
  if (!peek()) parse_fail(0, "empty file");
  {
    std::string k = lower(peek()->text);
    if (k != "minimize" && k != "min")
      parse_fail(peek()->line, "expected 'Minimize'");
    ++i;
  }
  if (peek() && peek()->text != ":" && !is_keyword(peek()->text) &&
      i + 1 < toks.size() && toks[i + 1].text == ":") {
    i += 2; // objective label
  }
  read_terms(m.objective);

  // Constraints.
  {
    const Token* t = peek();
    if (!t) parse_fail(toks.back().line, "missing 'Subject To'");
    std::string k = lower(t->text);
    if (k == "subject") {
      ++i;
      if (!peek() || lower(peek()->text) != "to")
        parse_fail(t->line, "expected 'Subject To'");
      ++i;
    } else if (k == "st" || k == "s.t.") {
      ++i;
    } else {
      parse_fail(t->line, "expected 'Subject To'");
    }
  }
  while (peek() && !is_keyword(peek()->text)) {
    MilpRow row;
    const Token* t = peek();
    if (i + 1 < toks.size() && toks[i + 1].text == ":") {
      row.name = t->text;
      i += 2;
    }
    read_terms(row.terms);
    t = peek();
    if (!t || !is_sense(t->text))
      parse_fail(t ? t->line : toks.back().line,
                 "constraint without a relation");
    row.sense = (t->text == "=")   ? RowSense::EQ
                : (t->text[0] == '<') ? RowSense::LE
                                      : RowSense::GE;
    ++i;
    row.rhs = read_number();
    m.rows.push_back(std::move(row));
  }

  // Optional sections in any order until End.
  while (const Token* t = peek()) {
    std::string k = lower(t->text);
    if (k == "end") {
      ++i;
      break;
    }
    if (k == "bounds") {
      ++i;
      while (peek() && !is_keyword(peek()->text)) {
        const Token* a = peek();
        if (is_number(a->text)) {
          double lo = read_number();
          if (!peek() || peek()->text != "<=")
            parse_fail(a->line, "expected '<=' in bound");
          ++i;
          const Token* nm = peek();
          if (!nm || is_number(nm->text)) parse_fail(a->line, "expected a name");
          int v = var_id(nm->text);
          ++i;
          m.vars[v].lb = lo;
          if (peek() && peek()->text == "<=") {
            ++i;
            m.vars[v].ub = read_number();
          }
        } else {
          int v = var_id(a->text);
          ++i;
          const Token* op = peek();
          if (!op) parse_fail(a->line, "truncated bound");
          if (lower(op->text) == "free") {
            ++i;
            m.vars[v].lb = -std::numeric_limits<double>::infinity();
            m.vars[v].ub = std::numeric_limits<double>::infinity();
          } else if (op->text == "<=") {
            ++i;
            m.vars[v].ub = read_number();
          } else if (op->text == ">=") {
            ++i;
            m.vars[v].lb = read_number();
          } else if (op->text == "=") {
            ++i;
            double x = read_number();
            m.vars[v].lb = m.vars[v].ub = x;
          } else {
            parse_fail(op->line, "bad bound operator '" + op->text + "'");
          }
        }
      }
    } else if (k == "binaries" || k == "binary" || k == "bin") {
      ++i;
      while (peek() && !is_keyword(peek()->text)) {
        int v = var_id(peek()->text);
        m.vars[v].type = VarType::Binary;
        if (std::isinf(m.vars[v].ub)) m.vars[v].ub = 1.0;
        ++i;
      }
    } else {
      parse_fail(t->line, "unsupported section '" + t->text + "'");
    }
  }

  m.e_var = m.find_var("E");
  m.cmax_var = m.find_var("Cmax");
  return m;
}

} // namespace bpmstp
