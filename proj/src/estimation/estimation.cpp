#include "skorohull/estimation.hpp"

#include <cmath>
#include <numbers>
#include <variant>

#include "skorohull/errors.hpp"

namespace skorohull::estimation {

HullEstimate hull_estimate(const dynamics::PathEnsemble& ensemble, int j,
                           std::optional<int> copies) {
  require(j >= 1 && j <= ensemble.grid().steps(),
          "time index must satisfy 1 <= j <= n");
  const int count = copies.value_or(ensemble.copies());
  require(count >= 1 && count <= ensemble.copies(), "copy count out of range");
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) states.emplace_back(ensemble.state(i, j));
  return hull_estimate(std::move(states), j);
}

HullEstimate hull_estimate(std::vector<Vector> states, int j) {
  require(j >= 1, "time index must be >= 1");
  HullEstimate est;
  est.time_index = j;
  est.copies = static_cast<int>(states.size());
  est.hull = geometry::convex_hull(std::move(states));
  if (est.hull.dim == 1) {
    est.lower = est.hull.vertices.front()[0];
    est.upper = est.hull.vertices.back()[0];
  }
  return est;
}

double hausdorff_error_1d(const HullEstimate& estimate,
                          const geometry::ConvexBody& truth) {
  require(estimate.hull.dim == 1 && estimate.lower && estimate.upper,
          "Hausdorff error is defined for one-dimensional estimates only");
  const auto* interval = std::get_if<geometry::Interval>(&truth.shape());
  require(interval != nullptr, "truth must be an interval");
  const double slack = kGeometryTol;
  if (*estimate.lower < interval->lo - slack || *estimate.upper > interval->hi + slack) {
    throw ContainmentError("estimate is not contained in the true interval");
  }
  return std::max(interval->hi - *estimate.upper, *estimate.lower - interval->lo);
}

double pointwise_error(const HullEstimate& estimate, const Vector& x, double tol) {
  return geometry::distance_to_hull(estimate.hull, x, tol);
}

double projected_cdf(const ScalarCdf& phi, double lower, double upper, double x) {
  require(lower < upper, "projected CDF needs I < S");
  if (x < lower) return 0.0;
  if (x >= upper) return 1.0;
  return phi(x);
}

double GaussianCdf::operator()(double x) const {
  require(stddev > 0.0, "Gaussian standard deviation must be > 0");
  return 0.5 * std::erfc(-(x - mean) / (stddev * std::numbers::sqrt2));
}

}  // namespace skorohull::estimation
