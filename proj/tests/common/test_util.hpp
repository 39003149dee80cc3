#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>

#include "skorohull/geometry.hpp"

namespace skorohull::test {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

enum class BodyKind { kInterval, kBox, kBall, kPolytope };

inline std::string body_kind_name(BodyKind kind) {
  switch (kind) {
    case BodyKind::kInterval: return "Interval";
    case BodyKind::kBox: return "Box";
    case BodyKind::kBall: return "Ball";
    case BodyKind::kPolytope: return "Polytope";
  }
  return "Unknown";
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_point(int dim, double scale, std::mt19937_64& rng) {
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = uniform(rng, -scale, scale);
  return x;
}

// Smallest interior angle of a convex polygon given counterclockwise.
inline double min_vertex_angle(const std::vector<Vector>& poly) {
  const std::size_t n = poly.size();
  double smallest = std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector a = poly[(i + n - 1) % n] - poly[i];
    const Vector b = poly[(i + 1) % n] - poly[i];
    smallest = std::min(smallest, std::acos(a.dot(b) / (a.norm() * b.norm())));
  }
  return smallest;
}

// Box and ball pick two or three dimensions (capped by max_dim). Polytopes
// are 2D with 3..8 jittered facet directions around the circle, so they are
// bounded, and are redrawn until every vertex angle is at least 45 degrees:
// the grid oracle's error bound needs corners that are not needle-sharp.
inline geometry::ConvexBody random_body(BodyKind kind, std::mt19937_64& rng, int max_dim = 3) {
  using geometry::ConvexBody;
  switch (kind) {
    case BodyKind::kInterval: {
      const double lo = uniform(rng, -2, 1);
      return ConvexBody::interval(lo, lo + uniform(rng, 0.2, 2));
    }
    case BodyKind::kBox: {
      const int m = std::min(max_dim, 2 + static_cast<int>(rng() % 2));
      const Vector lo = random_point(m, 1.0, rng);
      Vector hi = lo;
      for (int i = 0; i < m; ++i) hi[i] += uniform(rng, 0.2, 2);
      return ConvexBody::box(lo, hi);
    }
    case BodyKind::kBall: {
      const int m = std::min(max_dim, 2 + static_cast<int>(rng() % 2));
      return ConvexBody::ball(random_point(m, 1.0, rng), uniform(rng, 0.2, 2));
    }
    case BodyKind::kPolytope: {
      while (true) {
      const int k = 3 + static_cast<int>(rng() % 6);
      Matrix a(k, 2);
      Vector b(k);
      const Vector c = random_point(2, 0.5, rng);
      for (int i = 0; i < k; ++i) {
        const double t = 2 * std::numbers::pi * (i + uniform(rng, -0.15, 0.15)) / k;
        a(i, 0) = std::cos(t);
        a(i, 1) = std::sin(t);
        b[i] = a.row(i).dot(c) + uniform(rng, 0.3, 1.5);
      }
      auto body = ConvexBody::polytope(a, b);
      if (min_vertex_angle(geometry::convex_hull(body.vertices()).vertices) >= std::numbers::pi / 4) {
        return body;
      }
      }
    }
  }
  return ConvexBody::interval(0, 1);
}

}  // namespace skorohull::test
