#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "skorohull/errors.hpp"
#include "skorohull/geometry.hpp"

namespace skorohull::geometry {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const ConvexBody& body, const Vector& x) {
  if (x.size() != body.dim()) throw DimensionMismatch(body.dim(), x.size());
}

// Number of m-subsets of k rows, saturating.
double binomial(long k, long m) {
  double r = 1.0;
  for (long i = 1; i <= m; ++i) r = r * static_cast<double>(k - m + i) / i;
  return r;
}

// Calls fn(indices) for every m-subset of {0, ..., k-1}.
template <class Fn>
void for_each_subset(int k, int m, Fn&& fn) {
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = m - 1;
    while (i >= 0 && idx[i] == k - m + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

int affine_rank(const std::vector<Vector>& pts) {
  if (pts.size() < 2) return 0;
  Matrix diffs(pts.front().size(), static_cast<long>(pts.size()) - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.col(static_cast<long>(i) - 1) = pts[i] - pts[0];
  Eigen::FullPivLU<Matrix> lu(diffs);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

// Vertex enumeration over every m-subset of constraints, with an artificial
// bounding box |y_i| <= M so that unboundedness shows up as vertices on the
// artificial faces.
std::vector<Vector> enumerate_vertices(const Matrix& normals,
                                       const Vector& offsets) {
  const int k = static_cast<int>(normals.rows());
  const int m = static_cast<int>(normals.cols());
  double scale = 1.0;
  for (int i = 0; i < k; ++i) {
    scale = std::max(scale, std::abs(offsets[i]) / normals.row(i).norm());
  }
  const double big = 1e6 * scale;

  Matrix rows(k + 2 * m, m);
  Vector rhs(k + 2 * m);
  rows.topRows(k) = normals;
  rhs.head(k) = offsets;
  for (int i = 0; i < m; ++i) {
    rows.row(k + 2 * i).setZero();
    rows(k + 2 * i, i) = 1.0;
    rows.row(k + 2 * i + 1).setZero();
    rows(k + 2 * i + 1, i) = -1.0;
    rhs[k + 2 * i] = big;
    rhs[k + 2 * i + 1] = big;
  }
  const int total = k + 2 * m;
  if (binomial(total, m) > 5e6) {
    throw InvalidArgument("polytope too large for vertex enumeration");
  }

  std::vector<Vector> vertices;
  Matrix sub(m, m);
  Vector sub_rhs(m);
  for_each_subset(total, m, [&](const std::vector<int>& idx) {
    for (int r = 0; r < m; ++r) {
      sub.row(r) = rows.row(idx[r]);
      sub_rhs[r] = rhs[idx[r]];
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    Vector y = lu.solve(sub_rhs);
    if (!y.allFinite()) return;
    for (int r = 0; r < total; ++r) {
      const double slack = 1e-9 * rows.row(r).norm() * (1.0 + y.norm());
      if (rows.row(r).dot(y) > rhs[r] + slack) return;
    }
    for (const auto& v : vertices) {
      if ((v - y).norm() <= 1e-9 * (1.0 + y.norm())) return;
    }
    vertices.push_back(std::move(y));
  });

  if (vertices.empty()) throw InvalidArgument("polytope is empty");
  for (const auto& v : vertices) {
    if (v.cwiseAbs().maxCoeff() >= big * (1.0 - 1e-9)) {
      throw InvalidArgument("polytope is unbounded");
    }
  }
  if (affine_rank(vertices) < m) {
    throw InvalidArgument("polytope has empty interior");
  }
  return vertices;
}

std::vector<Vector> box_corners(const Vector& lo, const Vector& hi) {
  const long m = lo.size();
  if (m > 16) return {};
  std::vector<Vector> corners;
  corners.reserve(std::size_t{1} << m);
  for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
    Vector c(m);
    for (long i = 0; i < m; ++i) c[i] = (mask >> i) & 1UL ? hi[i] : lo[i];
    corners.push_back(std::move(c));
  }
  return corners;
}

// Primal active-set method for min ||y - x|| subject to A y <= b, started at
// the feasible point y. Rows in the working set stay linearly independent
// because a blocking row always has a_i . d > 0 for d in their null space.
Vector active_set_projection(const HPolytope& p, const Vector& x, Vector y,
                             std::vector<long> working) {
  const long k = p.normals.rows();
  const long max_iterations = 50 * k + 100;
  const double scale = 1.0 + x.norm() + y.norm();
  for (long it = 0; it < max_iterations; ++it) {
    const Vector g = x - y;
    Vector d = g;
    Vector lambda;
    if (!working.empty()) {
      Matrix a(static_cast<long>(working.size()), x.size());
      for (std::size_t r = 0; r < working.size(); ++r) {
        a.row(static_cast<long>(r)) = p.normals.row(working[r]);
      }
      lambda = (a * a.transpose()).ldlt().solve(a * g);
      d = g - a.transpose() * lambda;
    }
    if (d.norm() <= 1e-14 * scale) {
      if (working.empty()) return y;
      Eigen::Index worst = 0;
      if (lambda.minCoeff(&worst) >= -1e-13 * scale) return y;
      working.erase(working.begin() + worst);
      continue;
    }
    double step = 1.0;
    long blocking = -1;
    for (long i = 0; i < k; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double ad = p.normals.row(i).dot(d);
      if (ad <= 1e-15 * p.normals.row(i).norm() * d.norm()) continue;
      const double slack = std::max(0.0, p.offsets[i] - p.normals.row(i).dot(y));
      if (slack / ad < step) {
        step = slack / ad;
        blocking = i;
      }
    }
    y += step * d;
    if (blocking >= 0) working.push_back(blocking);
  }
  throw NotConverged("polytope active-set projection", (x - y).norm());
}

// Dykstra's alternating projections, then an exact active-set finish. The
// successive-iterate test can fire well before feasibility in acute corners,
// so the Dykstra iterate only seeds the finish: the start is the last
// feasible point on the segment from an interior point towards it.
Vector project_polytope(const HPolytope& p, const Vector& x, const Vector& interior) {
  const Vector residual = p.normals * x - p.offsets;
  if (residual.maxCoeff() <= 0.0) return x;

  const long k = p.normals.rows();
  const Vector sq_norms = p.normals.rowwise().squaredNorm();
  Matrix increments = Matrix::Zero(x.size(), k);
  Vector y = x;
  Vector z(x.size());
  Vector prev(x.size());
  for (int it = 0; it < kDykstraMaxIterations; ++it) {
    prev = y;
    for (long i = 0; i < k; ++i) {
      z = y + increments.col(i);
      const double violation = p.normals.row(i).dot(z) - p.offsets[i];
      if (violation > 0.0) {
        y = z - (violation / sq_norms[i]) * p.normals.row(i).transpose();
      } else {
        y = z;
      }
      increments.col(i) = z - y;
    }
    if ((y - prev).norm() <= kDykstraThreshold) break;
  }

  const Vector ray = y - interior;
  double t = 1.0;
  long hit = -1;
  for (long i = 0; i < k; ++i) {
    const double ad = p.normals.row(i).dot(ray);
    if (ad <= 0.0) continue;
    const double ti = (p.offsets[i] - p.normals.row(i).dot(interior)) / ad;
    if (ti < t) {
      t = ti;
      hit = i;
    }
  }
  std::vector<long> working;
  if (hit >= 0) working.push_back(hit);
  return active_set_projection(p, x, interior + t * ray, std::move(working));
}

}  // namespace

ConvexBody::ConvexBody(Shape shape, int dim, std::vector<Vector> vertices)
    : shape_(std::move(shape)), dim_(dim), vertices_(std::move(vertices)) {}

ConvexBody ConvexBody::interval(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi), "interval bounds must be finite");
  require(lo < hi, "interval requires lo < hi");
  return ConvexBody(Interval{lo, hi}, 1,
                    {Vector::Constant(1, lo), Vector::Constant(1, hi)});
}

ConvexBody ConvexBody::ball(Vector center, double radius) {
  require(center.size() >= 1, "ball center must be nonempty");
  require(center.allFinite(), "ball center must be finite");
  require(std::isfinite(radius) && radius > 0.0, "ball radius must be > 0");
  const int dim = static_cast<int>(center.size());
  return ConvexBody(Ball{std::move(center), radius}, dim, {});
}

ConvexBody ConvexBody::box(Vector lo, Vector hi) {
  require(lo.size() >= 1, "box must have dimension >= 1");
  if (lo.size() != hi.size()) throw DimensionMismatch(lo.size(), hi.size());
  require(lo.allFinite() && hi.allFinite(), "box bounds must be finite");
  for (long i = 0; i < lo.size(); ++i) {
    require(lo[i] < hi[i], "box requires lo[i] < hi[i] for every i");
  }
  const int dim = static_cast<int>(lo.size());
  auto corners = box_corners(lo, hi);
  return ConvexBody(Box{std::move(lo), std::move(hi)}, dim, std::move(corners));
}

ConvexBody ConvexBody::polytope(Matrix normals, Vector offsets) {
  require(normals.cols() >= 1, "polytope must have dimension >= 1");
  require(normals.rows() >= 1, "polytope needs at least one constraint");
  if (normals.rows() != offsets.size()) {
    throw DimensionMismatch(normals.rows(), offsets.size());
  }
  require(normals.allFinite() && offsets.allFinite(),
          "polytope data must be finite");
  for (long i = 0; i < normals.rows(); ++i) {
    require(normals.row(i).norm() > 0.0, "polytope normals must be nonzero");
  }
  auto vertices = enumerate_vertices(normals, offsets);
  const int dim = static_cast<int>(normals.cols());
  return ConvexBody(HPolytope{std::move(normals), std::move(offsets)}, dim,
                    std::move(vertices));
}

double ConvexBody::max_norm() const {
  return std::visit(
      Overloaded{
          [](const Interval& s) { return std::max(std::abs(s.lo), std::abs(s.hi)); },
          [](const Ball& s) { return s.center.norm() + s.radius; },
          [](const Box& s) {
            return s.lo.cwiseAbs().cwiseMax(s.hi.cwiseAbs()).norm();
          },
          [this](const HPolytope&) {
            double best = 0.0;
            for (const auto& v : vertices_) best = std::max(best, v.norm());
            return best;
          },
      },
      shape_);
}

std::vector<Vector> ConvexBody::boundary_samples(int count) const {
  if (const auto* b = std::get_if<Ball>(&shape_)) {
    std::vector<Vector> out;
    const long m = b->center.size();
    if (m == 2) {
      for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / count;
        Vector d(2);
        d << std::cos(a), std::sin(a);
        out.push_back(b->center + b->radius * d);
      }
      return out;
    }
    for (long i = 0; i < m; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector d = Vector::Zero(m);
        d[i] = sign;
        out.push_back(b->center + b->radius * d);
      }
    }
    if (m > 1 && m <= 10) {
      for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
        Vector d(m);
        for (long i = 0; i < m; ++i) d[i] = (mask >> i) & 1UL ? 1.0 : -1.0;
        out.push_back(b->center + b->radius * d.normalized());
      }
    }
    return out;
  }
  return vertices_;
}

Vector project(const ConvexBody& body, const Vector& x) {
  check_dim(body, x);
  return std::visit(
      Overloaded{
          [&](const Interval& s) -> Vector {
            return Vector::Constant(1, std::clamp(x[0], s.lo, s.hi));
          },
          [&](const Ball& s) -> Vector {
            const Vector d = x - s.center;
            const double r = d.norm();
            if (r <= s.radius) return x;
            return s.center + (s.radius / r) * d;
          },
          [&](const Box& s) -> Vector { return x.cwiseMax(s.lo).cwiseMin(s.hi); },
          [&](const HPolytope& s) -> Vector {
            Vector interior = Vector::Zero(body.dim());
            for (const auto& v : body.vertices()) interior += v;
            interior /= static_cast<double>(body.vertices().size());
            return project_polytope(s, x, interior);
          },
      },
      body.shape());
}

double distance_to_body(const ConvexBody& body, const Vector& x) {
  check_dim(body, x);
  if (const auto* b = std::get_if<Ball>(&body.shape())) {
    return std::max(0.0, (x - b->center).norm() - b->radius);
  }
  return (x - project(body, x)).norm();
}

bool contains(const ConvexBody& body, const Vector& x, double tol) {
  check_dim(body, x);
  if (const auto* p = std::get_if<HPolytope>(&body.shape())) {
    if ((p->normals * x - p->offsets).maxCoeff() <= 0.0) return true;
  }
  return distance_to_body(body, x) <= tol;
}

bool interior_contains(const ConvexBody& body, const Vector& x) {
  check_dim(body, x);
  return depth(body, x) > 0.0;
}

double depth(const ConvexBody& body, const Vector& x) {
  check_dim(body, x);
  return std::visit(
      Overloaded{
          [&](const Interval& s) { return std::min(x[0] - s.lo, s.hi - x[0]); },
          [&](const Ball& s) { return s.radius - (x - s.center).norm(); },
          [&](const Box& s) {
            return std::min((x - s.lo).minCoeff(), (s.hi - x).minCoeff());
          },
          [&](const HPolytope& s) {
            const Vector slack = s.offsets - s.normals * x;
            return slack.cwiseQuotient(s.normals.rowwise().norm()).minCoeff();
          },
      },
      body.shape());
}

double support(const ConvexBody& body, const Vector& direction) {
  check_dim(body, direction);
  require(direction.norm() > 0.0, "support direction must be nonzero");
  return std::visit(
      Overloaded{
          [&](const Interval& s) {
            return direction[0] > 0.0 ? direction[0] * s.hi : direction[0] * s.lo;
          },
          [&](const Ball& s) {
            return direction.dot(s.center) + s.radius * direction.norm();
          },
          [&](const Box& s) {
            double total = 0.0;
            for (long i = 0; i < direction.size(); ++i) {
              total += direction[i] > 0.0 ? direction[i] * s.hi[i]
                                          : direction[i] * s.lo[i];
            }
            return total;
          },
          [&](const HPolytope&) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : body.vertices()) {
              best = std::max(best, direction.dot(v));
            }
            return best;
          },
      },
      body.shape());
}

bool normal_cone_check(const ConvexBody& body, const Vector& x,
                       const Vector& normal, double tol) {
  check_dim(body, normal);
  if (!contains(body, x, tol)) {
    throw ContainmentError("normal cone queried at a point outside the body");
  }
  if (normal.norm() == 0.0) return true;
  return support(body, normal) - normal.dot(x) <= tol;
}

}  // namespace skorohull::geometry
