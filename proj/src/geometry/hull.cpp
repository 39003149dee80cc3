#include <algorithm>
#include <cmath>
#include <limits>

#include "skorohull/errors.hpp"
#include "skorohull/geometry.hpp"

namespace skorohull::geometry {
namespace {

double cross(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool lex_less(const Vector& a, const Vector& b) {
  return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
}

// Andrew's monotone chain. Collinear boundary points are dropped.
std::vector<Vector> monotone_chain(std::vector<Vector> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector& a, const Vector& b) { return a == b; }),
            pts.end());
  if (pts.size() <= 2) return pts;

  std::vector<Vector> chain;
  chain.reserve(2 * pts.size());
  for (const auto& p : pts) {
    while (chain.size() >= 2 && cross(chain[chain.size() - 2], chain.back(), p) <= 0.0) {
      chain.pop_back();
    }
    chain.push_back(p);
  }
  const std::size_t lower = chain.size() + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (chain.size() >= lower && cross(chain[chain.size() - 2], chain.back(), *it) <= 0.0) {
      chain.pop_back();
    }
    chain.push_back(*it);
  }
  chain.pop_back();
  return chain;
}

double segment_distance(const Vector& a, const Vector& b, const Vector& x) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

double polygon_distance(const std::vector<Vector>& v, const Vector& x) {
  if (v.size() == 1) return (x - v[0]).norm();
  if (v.size() == 2) return segment_distance(v[0], v[1], x);
  bool inside = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (cross(v[i], v[(i + 1) % v.size()], x) < 0.0) {
      inside = false;
      break;
    }
  }
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, segment_distance(v[i], v[(i + 1) % v.size()], x));
  }
  return best;
}

}  // namespace

Hull convex_hull(std::vector<Vector> points) {
  require(!points.empty(), "convex hull of an empty point set");
  const long m = points.front().size();
  require(m >= 1, "points must have dimension >= 1");
  for (const auto& p : points) {
    if (p.size() != m) throw DimensionMismatch(m, p.size());
  }

  Hull hull;
  hull.dim = static_cast<int>(m);
  if (m == 1) {
    const auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
    hull.vertices.push_back(*lo);
    if ((*hi)[0] != (*lo)[0]) hull.vertices.push_back(*hi);
  } else if (m == 2) {
    hull.vertices = monotone_chain(points);
  } else {
    hull.vertices = points;
  }
  hull.points = std::move(points);
  return hull;
}

double distance_to_hull(const Hull& hull, const Vector& x, double tol) {
  require(tol > 0.0, "hull distance tolerance must be > 0");
  if (x.size() != hull.dim) throw DimensionMismatch(hull.dim, x.size());
  require(!hull.vertices.empty(), "hull has no vertices");
  if (hull.dim == 1) {
    const double lo = hull.vertices.front()[0];
    const double hi = hull.vertices.back()[0];
    return std::max({lo - x[0], x[0] - hi, 0.0});
  }
  if (hull.dim == 2) return polygon_distance(hull.vertices, x);
  return min_norm_point(hull.vertices, x, tol).distance;
}

MinNormResult min_norm_point(std::span<const Vector> generators,
                             const Vector& x, double tol, int max_iterations) {
  require(!generators.empty(), "min-norm point needs generators");
  require(tol > 0.0, "min-norm tolerance must be > 0");
  const long m = x.size();
  for (const auto& g : generators) {
    if (g.size() != m) throw DimensionMismatch(m, g.size());
  }

  const std::size_t n = generators.size();
  std::vector<double> weights(n, 0.0);
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (generators[i] - x).squaredNorm();
    if (d < best) {
      best = d;
      start = i;
    }
  }
  weights[start] = 1.0;
  Vector y = generators[start];
  const double target = tol * tol;

  MinNormResult result;
  std::vector<double> dots(n);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = y - x;
    for (std::size_t i = 0; i < n; ++i) dots[i] = grad.dot(generators[i]);
    const double at_y = grad.dot(y);

    std::size_t fw = 0;
    std::size_t away = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (dots[i] < dots[fw]) fw = i;
      if (weights[i] > 0.0 && (away == n || dots[i] > dots[away])) away = i;
    }
    const double gap = at_y - dots[fw];
    result.gap = gap;
    result.iterations = it;
    if (gap <= target) {
      result.point = y;
      result.distance = (y - x).norm();
      return result;
    }

    const double away_gap = dots[away] - at_y;
    Vector dir;
    double step_max;
    const bool toward = gap >= away_gap;
    if (toward) {
      dir = generators[fw] - y;
      step_max = 1.0;
    } else {
      dir = y - generators[away];
      step_max = weights[away] / (1.0 - weights[away]);
    }
    const double dd = dir.squaredNorm();
    if (dd == 0.0) break;
    const double step = std::clamp(-grad.dot(dir) / dd, 0.0, step_max);

    if (toward) {
      for (auto& w : weights) w *= (1.0 - step);
      weights[fw] += step;
    } else {
      for (auto& w : weights) w *= (1.0 + step);
      weights[away] -= step;
      if (step == step_max) weights[away] = 0.0;
    }
    y += step * dir;
  }
  throw NotConverged("min-norm point solver hit its iteration cap", result.gap);
}

}  // namespace skorohull::geometry
