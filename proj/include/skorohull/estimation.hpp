#pragma once

#include <functional>
#include <optional>

#include "skorohull/dynamics.hpp"
#include "skorohull/geometry.hpp"

namespace skorohull::estimation {

// conv{X_j^1, ..., X_j^N} at one time index.
struct HullEstimate {
  int time_index = 0;
  int copies = 0;
  geometry::Hull hull;
  // m = 1 only: min and max of the states.
  std::optional<double> lower;
  std::optional<double> upper;
};

// Uses the first `copies` copies of the ensemble (all of them when omitted).
// Rejects j = 0, where the estimator is not defined.
HullEstimate hull_estimate(const dynamics::PathEnsemble& ensemble, int j,
                           std::optional<int> copies = std::nullopt);

HullEstimate hull_estimate(std::vector<Vector> states, int j);

// max{S - S_hat, I_hat - I} for truth [I, S]. Throws ContainmentError if a
// generator lies outside [I - 1e-9, S + 1e-9].
double hausdorff_error_1d(const HullEstimate& estimate,
                          const geometry::ConvexBody& truth);

// d(x, C_hat).
double pointwise_error(const HullEstimate& estimate, const Vector& x,
                       double tol = kHullTol);

using ScalarCdf = std::function<double(double)>;

// Phi(x) 1{I <= x < S} + 1{x >= S}: the law of the projection onto [I, S]
// of a variable with distribution function Phi.
double projected_cdf(const ScalarCdf& phi, double lower, double upper, double x);

struct GaussianCdf {
  double mean = 0.0;
  double stddev = 1.0;

  double operator()(double x) const;
};

}  // namespace skorohull::estimation
