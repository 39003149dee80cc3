#include "skorohull/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <variant>

#include "skorohull/errors.hpp"

namespace skorohull::oracle {
namespace {

// Plain membership per shape, no projection involved.
bool member(const geometry::ConvexBody& body, const Vector& y) {
  const auto& shape = body.shape();
  if (const auto* s = std::get_if<geometry::Interval>(&shape)) {
    return y[0] >= s->lo && y[0] <= s->hi;
  }
  if (const auto* s = std::get_if<geometry::Ball>(&shape)) {
    return (y - s->center).squaredNorm() <= s->radius * s->radius;
  }
  if (const auto* s = std::get_if<geometry::Box>(&shape)) {
    return (y.array() >= s->lo.array()).all() && (y.array() <= s->hi.array()).all();
  }
  const auto& p = std::get<geometry::HPolytope>(shape);
  const Vector slack = p.normals * y - p.offsets;
  return slack.maxCoeff() <= 1e-12;
}

std::vector<double> axis_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step));
  for (long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (out.back() < hi) out.push_back(hi);
  return out;
}

double segment_distance(const Vector& a, const Vector& b, const Vector& x) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - a - t * ab).norm();
}

double orient(const Vector& a, const Vector& b, const Vector& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

bool in_triangle(const Vector& a, const Vector& b, const Vector& c, const Vector& x) {
  const double area = orient(a, b, c);
  if (area == 0.0) return false;
  const double s = area > 0.0 ? 1.0 : -1.0;
  return s * orient(a, b, x) >= 0.0 && s * orient(b, c, x) >= 0.0 &&
         s * orient(c, a, x) >= 0.0;
}

double inverse_op_norm(const Matrix& sigma) {
  if (sigma.size() == 1) {
    if (sigma(0, 0) == 0.0) throw SingularMatrix("sigma is singular at a probe");
    return 1.0 / std::abs(sigma(0, 0));
  }
  Eigen::JacobiSVD<Matrix> svd(sigma);
  const double smallest = svd.singularValues()[sigma.rows() - 1];
  if (smallest <= 0.0) throw SingularMatrix("sigma is singular at a probe");
  return 1.0 / smallest;
}

}  // namespace

StepConstants step_constants(const dynamics::SdeModel& model, double bound,
                             double delta, int probe_count, std::uint64_t seed) {
  require(bound > 0.0, "m_C must be > 0");
  require(delta > 0.0, "delta must be > 0");
  require(probe_count >= 1000, "probe_count must be >= 1000");
  const int m = model.dim;

  std::vector<Vector> probes;
  probes.push_back(Vector::Zero(m));
  for (int i = 0; i < m; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector v = Vector::Zero(m);
      v[i] = sign * bound;
      probes.push_back(std::move(v));
    }
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int p = 0; p < probe_count; ++p) {
    Vector d(m);
    for (int k = 0; k < m; ++k) d[k] = normal(gen);
    const double n = d.norm();
    if (n == 0.0) continue;
    const double r = bound * std::pow(unit(gen), 1.0 / m);
    probes.push_back(d * (r / n));
  }

  StepConstants out;
  out.bound = bound;
  for (const auto& v : probes) {
    const double inv = inverse_op_norm(model.diffusion(v));
    out.sup_inv_norm = std::max(out.sup_inv_norm, inv);
    out.sup_inv_drift = std::max(out.sup_inv_drift, inv * model.drift(v).norm());
  }
  out.c1 = 1.0 + (model.lip_drift + model.lip_diffusion * out.sup_inv_drift) * delta;
  out.c2 = 1.0 + 2.0 * bound * model.lip_diffusion * out.sup_inv_norm;
  return out;
}

Vector brute_force_projection(const geometry::ConvexBody& body, const Vector& x,
                              double resolution) {
  require(body.dim() <= 2, "grid oracle supports m <= 2");
  require(resolution > 0.0, "resolution must be > 0");
  if (x.size() != body.dim()) throw DimensionMismatch(body.dim(), x.size());
  const int m = body.dim();

  std::vector<std::vector<double>> axes;
  for (int i = 0; i < m; ++i) {
    Vector e = Vector::Zero(m);
    e[i] = 1.0;
    const double hi = geometry::support(body, e);
    const double lo = -geometry::support(body, -e);
    axes.push_back(axis_grid(lo, hi, resolution));
  }

  // Along every grid line, bracket the feasible segment between grid nodes and
  // bisect its ends on membership alone, then clamp x onto it. Candidates sit
  // on the boundary itself, so the answer does not drift along flat faces.
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const auto& line = axes[k];
    std::vector<double> across = m == 1 ? std::vector<double>{0.0} : axes[1 - k];
    const double xc = m == 1 ? 0.0 : x[1 - k];
    // Nearest lines first; a line farther than the best candidate cannot win.
    std::sort(across.begin(), across.end(),
              [xc](double a, double b) { return std::abs(a - xc) < std::abs(b - xc); });
    for (double c : across) {
      if ((c - xc) * (c - xc) >= best_dist) break;
      Vector y(m);
      if (m == 2) y[1 - k] = c;
      auto feasible_at = [&](double t) {
        y[k] = t;
        return member(body, y);
      };
      // The feasible part of a line is an interval, so scan inward from both ends.
      std::size_t first = 0;
      while (first < line.size() && !feasible_at(line[first])) ++first;
      if (first == line.size()) continue;
      std::size_t last = line.size() - 1;
      while (last > first && !feasible_at(line[last])) --last;
      // Moves `in` toward `out` while staying feasible.
      auto bisect = [&](double in, double out) {
        for (int it = 0; it < 80 && in != out; ++it) {
          const double mid = 0.5 * (in + out);
          if (mid == in || mid == out) break;
          (feasible_at(mid) ? in : out) = mid;
        }
        return in;
      };
      const double lo = first > 0 ? bisect(line[first], line[first - 1]) : line[first];
      const double hi = last + 1 < line.size() ? bisect(line[last], line[last + 1]) : line[last];
      y[k] = std::clamp(x[k], lo, hi);
      if (!member(body, y)) continue;
      const double d = (y - x).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = y;
      }
    }
  }
  if (best.size() == 0) {
    throw InvalidArgument("no feasible grid point; resolution too coarse");
  }
  return best;
}

double brute_force_hull_distance(std::span<const Vector> points, const Vector& x,
                                 int /*grid_per_axis*/) {
  require(!points.empty(), "hull oracle needs points");
  if (x.size() != 2) throw DimensionMismatch(2, x.size());
  for (const auto& p : points) {
    if (p.size() != 2) throw DimensionMismatch(2, p.size());
  }
  require(points.size() <= 12, "hull oracle is limited to 12 points");
  const std::size_t n = points.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        if (in_triangle(points[a], points[b], points[c], x)) return 0.0;
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    best = std::min(best, (x - points[a]).norm());
    for (std::size_t b = a + 1; b < n; ++b) {
      best = std::min(best, segment_distance(points[a], points[b], x));
    }
  }
  return best;
}

double empirical_cdf(std::span<const double> samples, double x) {
  require(!samples.empty(), "empirical CDF needs samples");
  const auto count = std::count_if(samples.begin(), samples.end(),
                                   [x](double s) { return s <= x; });
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

double sorted_empirical_cdf(std::span<const double> sorted, double x) {
  require(!sorted.empty(), "empirical CDF needs samples");
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double dkw_band(std::size_t samples, double alpha) {
  require(samples > 0, "DKW band needs samples");
  require(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

double normal_cdf_reference(double x) {
  if (std::isnan(x)) return x;
  if (std::abs(x) <= 7.0) {
    // Phi(x) = 1/2 + phi(x) (x + x^3/3 + x^5/(3*5) + ...)
    long double term = x;
    long double sum = x;
    const long double x2 = static_cast<long double>(x) * x;
    for (int k = 1; k < 500; ++k) {
      term *= x2 / (2 * k + 1);
      const long double next = sum + term;
      if (next == sum) break;
      sum = next;
    }
    const long double density = std::exp(-0.5L * x2) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    return static_cast<double>(0.5L + density * sum);
  }
  // Mills ratio R(z) = Q(z)/phi(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))).
  const double z = std::abs(x);
  const double tiny = 1e-300;
  double f = z;
  double c = z;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    d = z + k * d;
    d = d == 0.0 ? tiny : 1.0 / d;
    c = z + k / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double tail = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / f;
  return x < 0.0 ? tail : 1.0 - tail;
}

Step1Report step1_bound_check(const dynamics::SdeModel& model,
                              const dynamics::PathEnsemble& ensemble,
                              const dynamics::Multifunction& mf,
                              std::span<const Vector> probes, double slack,
                              const StepConstants& constants) {
  require(ensemble.has_h(), "step-1 check needs an ensemble simulated with keep_h");
  if (ensemble.dim() != model.dim) throw DimensionMismatch(model.dim, ensemble.dim());
  const auto& grid = ensemble.grid();
  const int n = grid.steps();
  const int m = model.dim;
  const double delta = grid.delta();
  const auto bodies = mf.on_grid(grid);

  for (const auto& x : probes) {
    if (x.size() != m) throw DimensionMismatch(m, x.size());
    for (int j = 1; j <= n; ++j) {
      if (!geometry::contains(bodies[static_cast<std::size_t>(j)], x, kGeometryTol)) {
        throw ContainmentError("probe is not in C(t_j) for j = " + std::to_string(j));
      }
    }
  }

  // Per-probe terms that do not depend on the copy.
  std::vector<Matrix> sigma_at_probe;
  std::vector<Vector> drift_at_probe;
  for (const auto& x : probes) {
    sigma_at_probe.push_back(model.diffusion(x));
    drift_at_probe.push_back(model.drift(x) * delta);
  }

  Step1Report report;
  report.constants = constants;
  for (int i = 0; i < ensemble.copies(); ++i) {
    const Matrix z = dynamics::gaussian_increments(
        ensemble.seed(), static_cast<std::uint64_t>(i) + 1, n, m, delta);
    for (int j = 0; j < n; ++j) {
      const Vector xj = ensemble.state(i, j);
      const Vector h = ensemble.pre_projection(i, j + 1);
      const Vector zj = z.row(j).transpose();
      const Vector rebuilt = xj + model.drift(xj) * delta + model.diffusion(xj) * zj;
      if ((rebuilt - h).norm() > 1e-12 * (1.0 + h.norm())) ++report.h_mismatches;
      for (std::size_t p = 0; p < probes.size(); ++p) {
        const Vector& x = probes[p];
        const double lhs = (h - x).norm();
        const double remainder = (sigma_at_probe[p] * zj + drift_at_probe[p]).norm();
        const double rhs = constants.c1 * (xj - x).norm() + constants.c2 * remainder;
        const double margin = lhs - rhs;
        report.worst_margin = std::max(report.worst_margin, margin);
        ++report.checks;
        if (margin > slack) ++report.violations;
      }
    }
  }
  return report;
}

Step1Report step1_bound_check(const dynamics::SdeModel& model,
                              const dynamics::PathEnsemble& ensemble,
                              const dynamics::Multifunction& mf,
                              std::span<const Vector> probes, double slack) {
  const double bound = dynamics::uniform_bound(mf, ensemble.grid());
  const auto constants =
      step_constants(model, bound, ensemble.grid().delta(), 4096);
  return step1_bound_check(model, ensemble, mf, probes, slack, constants);
}

double hitting_frequency(const dynamics::PathEnsemble& ensemble,
                         const dynamics::Multifunction& mf, int j,
                         const Vector& x, double eps) {
  require(ensemble.has_h(), "hitting frequency needs pre-projection states");
  require(j >= 1 && j <= ensemble.grid().steps(), "time index out of range");
  require(eps > 0.0, "eps must be > 0");
  const auto body = mf(ensemble.grid().node(j));
  std::size_t hits = 0;
  for (int i = 0; i < ensemble.copies(); ++i) {
    const Vector h = ensemble.pre_projection(i, j);
    if ((h - x).norm() <= eps && geometry::interior_contains(body, h)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ensemble.copies());
}

}  // namespace skorohull::oracle
