#pragma once

// Text formats used by the toolkit:
//  * instance files   — line 1 "N M K", line 2 the N processing times,
//                       line 3 the M machine rates, line 4 the K slot costs;
//                       '#' starts a comment, blank lines are ignored.
//  * front CSV        — header "makespan,tec", one point per row, ascending
//                       makespan, energy cost with six decimals.
//  * schedule sidecar — one "job machine start" triple per line, all three
//                       1-based, plus a leading comment naming the columns.
//  * query lists      — one "makespan tec" pair per line for attainment data.
// Parsers report the offending line (and token where it helps) in the
// exception message.

#include <string>
#include <vector>

#include "bpmstp/core.hpp"
#include "bpmstp/metrics.hpp"

namespace bpmstp {

Instance parse_instance(const std::string& text);
Instance read_instance(const std::string& path);
std::string format_instance(const Instance& ins); // canonical four-line form
void write_instance(const Instance& ins, const std::string& path);

std::string format_front_csv(const Front& f);
void write_front_csv(const Front& f, const std::string& path);
Front read_front_csv(const std::string& path); // points only, no schedules

std::string format_schedule(const FeasibleSchedule& s);
void write_schedule(const FeasibleSchedule& s, const std::string& path);
FeasibleSchedule read_schedule(const std::string& path);

std::vector<Point2> read_queries(const std::string& path);

// Existing files matching a pattern whose basename may contain '*'
// wildcards (directory part is taken literally); sorted lexicographically.
// A pattern without wildcards returns the path iff the file exists.
std::vector<std::string> glob_files(const std::string& pattern);

// Reads a whole file into a string; throws std::runtime_error when the file
// cannot be opened.
std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& content);

} // namespace bpmstp
