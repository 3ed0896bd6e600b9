#include "bpmstp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace bpmstp {

namespace {

bool pt_less(const Point2& a, const Point2& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

double euclid(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

} // namespace

std::vector<Point2> to_points(const Front& f) {
  std::vector<Point2> out;
  out.reserve(f.points.size());
  for (const FrontPoint& p : f.points)
    out.push_back({(double)p.obj.makespan, p.obj.tec});
  return out;
}

double d_r(const std::vector<Point2>& front,
           const std::vector<Point2>& reference, DrNormalization norm) {
  if (reference.empty()) throw std::invalid_argument("d_r: empty reference");
  if (front.empty()) throw std::invalid_argument("d_r: empty front");

  // Scale factors; affine offsets cancel inside coordinate differences.
  double xs = 1.0, ys = 1.0;
  if (norm == DrNormalization::ReferenceExtremes) {
    double xmin = reference[0].x, xmax = reference[0].x;
    double ymin = reference[0].y, ymax = reference[0].y;
    for (const Point2& r : reference) {
      xmin = std::min(xmin, r.x);
      xmax = std::max(xmax, r.x);
      ymin = std::min(ymin, r.y);
      ymax = std::max(ymax, r.y);
    }
    if (xmax > xmin) xs = xmax - xmin;
    if (ymax > ymin) ys = ymax - ymin;
  }

  double total = 0.0;
  for (const Point2& r : reference) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const Point2& f : front) {
      double dx = (f.x - r.x) / xs, dy = (f.y - r.y) / ys;
      dmin = std::min(dmin, std::hypot(dx, dy));
    }
    total += dmin;
  }
  return total / (double)reference.size();
}

double purity(const std::vector<Point2>& front,
              const std::vector<Point2>& reference) {
  if (front.empty()) throw std::invalid_argument("purity: empty front");
  auto key = [](const Point2& p) {
    return std::pair<double, long long>(p.x, std::llround(p.y * 1e9));
  };
  std::set<std::pair<double, long long>> ref;
  for (const Point2& r : reference) ref.insert(key(r));
  std::size_t hits = 0;
  for (const Point2& f : front) hits += ref.count(key(f));
  return (double)hits / (double)front.size();
}

double hypervolume(const std::vector<Point2>& front, Point2 r) {
  std::vector<Point2> pts;
  for (const Point2& p : front)
    if (p.x <= r.x && p.y <= r.y) pts.push_back(p);
  std::sort(pts.begin(), pts.end(), pt_less);
  double area = 0.0, ceiling = r.y;
  for (const Point2& p : pts)
    if (p.y < ceiling) {
      area += (r.x - p.x) * (ceiling - p.y);
      ceiling = p.y;
    }
  return area;
}

double spacing(std::vector<Point2> front) {
  std::size_t n = front.size();
  if (n < 2) throw std::invalid_argument("spacing: needs at least two points");
  std::sort(front.begin(), front.end(), pt_less);
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dmin = std::min(dmin, std::fabs(front[i].x - front[j].x) +
                                std::fabs(front[i].y - front[j].y));
    }
    delta[i] = dmin;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) mean += delta[i];
  mean /= (double)(n - 1);
  double ss = 0.0;
  for (double d : delta) ss += (d - mean) * (d - mean);
  return std::sqrt(ss / (double)n);
}

double spread(std::vector<Point2> front, const std::vector<Point2>& reference) {
  std::size_t n = front.size();
  if (n < 2) throw std::invalid_argument("spread: needs at least two points");
  std::sort(front.begin(), front.end(), pt_less);

  double df = 0.0, dl = 0.0;
  if (!reference.empty()) {
    Point2 ref_first = reference[0]; // min first objective
    Point2 ref_last = reference[0];  // min second objective
    for (const Point2& p : reference) {
      if (p.x < ref_first.x || (p.x == ref_first.x && p.y < ref_first.y))
        ref_first = p;
      if (p.y < ref_last.y || (p.y == ref_last.y && p.x < ref_last.x))
        ref_last = p;
    }
    df = euclid(ref_first, front.front());
    dl = euclid(ref_last, front.back());
  }

  std::vector<double> gaps(n - 1);
  double mean = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    gaps[i] = euclid(front[i], front[i + 1]);
    mean += gaps[i];
  }
  mean /= (double)(n - 1);

  double numer = df + dl, denom = df + dl + (double)(n - 1) * mean;
  for (double g : gaps) numer += std::fabs(g - mean);
  if (denom == 0.0) return 0.0;
  return numer / denom;
}

double fm1(const Front& front) {
  if (front.empty()) throw std::invalid_argument("fm1: empty front");
  std::size_t bad = 0;
  for (const FrontPoint& p : front.points) bad += p.feasible ? 0 : 1;
  return (double)bad / (double)front.size();
}

double fm2(const Front& front, int n_jobs) {
  if (front.empty()) throw std::invalid_argument("fm2: empty front");
  if (n_jobs < 1) throw std::invalid_argument("fm2: n_jobs must be positive");
  long long bad = 0, unscheduled = 0;
  for (const FrontPoint& p : front.points)
    if (!p.feasible) {
      ++bad;
      unscheduled += p.unscheduled;
    }
  if (bad == 0) return 0.0;
  return (double)unscheduled / ((double)bad * (double)n_jobs);
}

std::vector<double> eaf(const std::vector<std::vector<Point2>>& fronts,
                        const std::vector<Point2>& queries) {
  if (fronts.empty()) throw std::invalid_argument("eaf: no fronts");
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Point2& q : queries) {
    int attained = 0;
    for (const auto& f : fronts)
      for (const Point2& p : f)
        if (p.x <= q.x + 1e-9 && p.y <= q.y + 1e-9) {
          ++attained;
          break;
        }
    out.push_back((double)attained / (double)fronts.size());
  }
  return out;
}

Front reference_front(const std::vector<Front>& fronts) {
  std::vector<FrontPoint> all;
  for (const Front& f : fronts)
    all.insert(all.end(), f.points.begin(), f.points.end());
  return pareto_filter(std::move(all));
}

MetricReport score_front(const Front& front,
                         const std::vector<Point2>& reference,
                         std::optional<Point2> reference_point, int n_jobs,
                         DrNormalization norm) {
  MetricReport rep;
  rep.reference_point = reference_point;
  std::vector<Point2> pts = to_points(front);
  if (front.empty()) return rep;

  if (reference_point) rep.hypervolume = hypervolume(pts, *reference_point);
  if (!reference.empty()) {
    rep.purity = purity(pts, reference);
    rep.d_r = d_r(pts, reference, norm);
  }
  if (pts.size() >= 2) {
    rep.spacing = spacing(pts);
    rep.spread = spread(pts, reference);
  }
  rep.fm1 = fm1(front);
  rep.fm2 = fm2(front, std::max(1, n_jobs));
  return rep;
}

} // namespace bpmstp
