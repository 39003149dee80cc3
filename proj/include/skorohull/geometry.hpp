#pragma once

#include <span>
#include <variant>
#include <vector>

#include "skorohull/types.hpp"

namespace skorohull::geometry {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

struct Box {
  Vector lo;
  Vector hi;
};

// {y : normals * y <= offsets}. Rows of `normals` need not be unit length.
struct HPolytope {
  Matrix normals;
  Vector offsets;
};

using Shape = std::variant<Interval, Ball, Box, HPolytope>;

// A compact convex set with nonempty interior. Immutable once built; the
// factories validate the shape and throw InvalidArgument on bad input.
class ConvexBody {
 public:
  static ConvexBody interval(double lo, double hi);
  static ConvexBody ball(Vector center, double radius);
  static ConvexBody box(Vector lo, Vector hi);
  // Enumerates vertices up front; throws if the set is empty, unbounded or
  // flat.
  static ConvexBody polytope(Matrix normals, Vector offsets);

  int dim() const noexcept { return dim_; }
  const Shape& shape() const noexcept { return shape_; }

  // Extreme points for interval/box/polytope; empty for a ball.
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }

  // sup of ||y|| over the body.
  double max_norm() const;

  // Points on the boundary: all vertices for polyhedral shapes, `count`
  // evenly spread directions for a ball.
  std::vector<Vector> boundary_samples(int count = 64) const;

 private:
  ConvexBody(Shape shape, int dim, std::vector<Vector> vertices);

  Shape shape_;
  int dim_;
  std::vector<Vector> vertices_;
};

// Euclidean projection. Exact for interval, box and ball. Polytopes run
// Dykstra's alternating projections and finish with an exact active-set
// solve seeded by the Dykstra iterate.
Vector project(const ConvexBody& body, const Vector& x);

double distance_to_body(const ConvexBody& body, const Vector& x);

bool contains(const ConvexBody& body, const Vector& x,
              double tol = kGeometryTol);

// Strict membership in the interior.
bool interior_contains(const ConvexBody& body, const Vector& x);

// Signed distance to the boundary for points inside (positive in the
// interior, zero on the boundary). Negative values mean the point is outside
// but are only a lower bound on -distance_to_body for polytopes.
double depth(const ConvexBody& body, const Vector& x);

double support(const ConvexBody& body, const Vector& direction);

// True iff `normal` lies in the normal cone of `body` at `x` up to `tol`,
// i.e. support(body, normal) - <normal, x> <= tol. Throws ContainmentError if
// x is not in the body.
bool normal_cone_check(const ConvexBody& body, const Vector& x,
                       const Vector& normal, double tol = kGeometryTol);

// Iteration cap and stopping threshold for the polytope projection.
inline constexpr int kDykstraMaxIterations = 100000;
inline constexpr double kDykstraThreshold = 1e-10;

struct Hull {
  int dim = 0;
  std::vector<Vector> points;
  // m = 1: {min, max}. m = 2: extreme points, counterclockwise, starting from
  // the lexicographically smallest. m >= 3: every input point.
  std::vector<Vector> vertices;
};

Hull convex_hull(std::vector<Vector> points);

double distance_to_hull(const Hull& hull, const Vector& x,
                        double tol = kHullTol);

struct MinNormResult {
  Vector point;
  double distance = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

inline constexpr int kMinNormMaxIterations = 200000;

// Closest point of conv(generators) to x by Frank-Wolfe with away steps.
// Stops once the duality gap is <= tol^2; throws NotConverged otherwise.
MinNormResult min_norm_point(std::span<const Vector> generators,
                             const Vector& x, double tol = kHullTol,
                             int max_iterations = kMinNormMaxIterations);

}  // namespace skorohull::geometry
