#pragma once

// Front quality, distribution, and feasibility metrics for bi-objective
// (makespan, energy-cost) fronts, plus reference-front assembly and
// attainment-function data.

#include <optional>
#include <string>
#include <vector>

#include "bpmstp/core.hpp"

namespace bpmstp {

struct Point2 {
  double x = 0.0; // makespan
  double y = 0.0; // energy cost
};

std::vector<Point2> to_points(const Front& f);

enum class DrNormalization {
  None,
  // Each objective is affinely mapped so the *reference* front spans [0, 1]
  // before distances are taken; a degenerate span (all reference points
  // equal in one objective) leaves that objective unscaled.
  ReferenceExtremes,
};

// Mean over reference points of the Euclidean distance to the closest front
// point. Throws on an empty front or an empty reference.
double d_r(const std::vector<Point2>& front,
           const std::vector<Point2>& reference,
           DrNormalization norm = DrNormalization::None);

// Fraction of front points that appear in the reference front, comparing the
// first objective exactly and the second rounded at 1e-9. Throws on an empty
// front.
double purity(const std::vector<Point2>& front,
              const std::vector<Point2>& reference);

// Area dominated by the front and bounded by reference_point; points not
// coordinatewise <= reference_point contribute nothing. Empty front -> 0.
double hypervolume(const std::vector<Point2>& front, Point2 reference_point);

// Deviation of nearest-neighbour (Manhattan) gaps: delta_i is point i's
// minimum L1 distance to another front point with points in ascending front
// order, the mean runs over the first N-1 of them, and the result is
// sqrt(mean over all N of squared deviation from that mean). Needs >= 2
// points (throws otherwise).
double spacing(std::vector<Point2> front);

// Distribution measure (d_f + d_l + sum |d_i - dbar|) over
// (d_f + d_l + (N-1) dbar), with d_i the consecutive Euclidean gaps of the
// front in ascending order and d_f / d_l the distances from the reference
// front's extreme points (min first objective / min second objective) to the
// front's matching boundary points. Without a reference, d_f = d_l = 0. A
// zero denominator yields 0. Needs >= 2 points (throws otherwise).
double spread(std::vector<Point2> front,
              const std::vector<Point2>& reference = {});

// Fraction of front points flagged infeasible. Throws on an empty front.
double fm1(const Front& front);

// Unscheduled jobs in infeasible points, averaged: total unscheduled over
// (infeasible points * n_jobs); 0 when every point is feasible. Throws on an
// empty front or n_jobs < 1.
double fm2(const Front& front, int n_jobs);

// For each query point, the fraction of fronts containing a point weakly
// dominating it (<= in both objectives, tolerance 1e-9). Throws when no
// fronts are given.
std::vector<double> eaf(const std::vector<std::vector<Point2>>& fronts,
                        const std::vector<Point2>& queries);

// Non-dominated union of the given fronts.
Front reference_front(const std::vector<Front>& fronts);

// Everything above for one front, with absent values where a metric's
// precondition fails (singleton spacing/spread, missing reference, missing
// reference point) rather than an error.
struct MetricReport {
  std::optional<double> hypervolume;
  std::optional<double> purity;
  std::optional<double> d_r;
  std::optional<double> spacing;
  std::optional<double> spread;
  std::optional<double> fm1;
  std::optional<double> fm2;
  std::string reference_id;              // label of the reference used
  std::optional<Point2> reference_point; // hypervolume anchor used
};

MetricReport score_front(const Front& front,
                         const std::vector<Point2>& reference,
                         std::optional<Point2> reference_point, int n_jobs,
                         DrNormalization norm = DrNormalization::None);

} // namespace bpmstp
