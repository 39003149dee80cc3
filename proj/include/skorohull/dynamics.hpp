#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skorohull/geometry.hpp"
#include "skorohull/types.hpp"

namespace skorohull::dynamics {

using geometry::ConvexBody;

// dX = b(X) dt + sigma(X) dW, with declared Lipschitz constants. The
// evaluators must be safe for concurrent read-only use.
struct SdeModel {
  std::string name;
  int dim = 1;
  std::function<Vector(const Vector&)> drift;
  std::function<Matrix(const Vector&)> diffusion;
  Vector x0;
  double lip_drift = 0.0;
  double lip_diffusion = 0.0;
  bool constant_diffusion = false;
};

// b(x) = -theta x, sigma = s I.
SdeModel ornstein_uhlenbeck(int dim, double theta, double s, Vector x0);
// b = 0, sigma = s I.
SdeModel brownian(int dim, double s, Vector x0);
// b(x) = -tanh(x) coordinate-wise, sigma = s I.
SdeModel tanh_drift(int dim, double s, Vector x0);
// b(x) = -theta x, sigma(x) = diag(s0 + s1 tanh(x_i)); requires s0 > |s1|.
SdeModel state_dependent_sigma(int dim, double theta, double s0, double s1,
                               Vector x0);

// Evaluates sigma(x) and rejects it unless its reciprocal condition number is
// at least 1e-12.
Matrix checked_diffusion(const SdeModel& model, const Vector& x);

// Empirical check of the declared Lipschitz constants over `pairs` random
// pairs drawn uniformly from the box [lo, hi]. Returns the worst observed
// ratio to the declared constant (<= 1 + 1e-6 means respected) for drift and
// diffusion (operator norm) respectively.
std::pair<double, double> lipschitz_ratios(const SdeModel& model,
                                           const Vector& lo, const Vector& hi,
                                           int pairs, std::uint64_t seed);

class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double delta() const noexcept { return horizon_ / steps_; }
  // t_j = j T / n, computed directly so that node(n) == T exactly.
  double node(int j) const;

 private:
  double horizon_;
  int steps_;
};

// t -> C(t), a convex-body-valued map on [0, T].
class Multifunction {
 public:
  using Evaluator = std::function<ConvexBody(double)>;

  Multifunction(std::string name, Evaluator evaluator, bool decreasing);

  static Multifunction constant(ConvexBody body);
  // Ball of radius r0 - rate t; needs r0 - rate T > 0.
  static Multifunction shrinking_ball(Vector center, double r0, double rate,
                                      double horizon);
  // Box whose every face moves inward at `rate`; needs hi - lo > 2 rate T.
  static Multifunction shrinking_box(Vector lo, Vector hi, double rate,
                                     double horizon);
  // C(t) = body of the last breakpoint with time <= t. The first breakpoint
  // must be at time 0.
  static Multifunction piecewise_constant(
      std::vector<std::pair<double, ConvexBody>> pieces, bool decreasing);

  ConvexBody operator()(double t) const { return evaluator_(t); }
  bool decreasing() const noexcept { return decreasing_; }
  const std::string& name() const noexcept { return name_; }

  std::vector<ConvexBody> on_grid(const TimeGrid& grid) const;

 private:
  std::string name_;
  Evaluator evaluator_;
  bool decreasing_;
};

// max_j sup_{y in C(t_j)} ||y||.
double uniform_bound(const Multifunction& mf, const TimeGrid& grid);

// Samples `pairs` pairs s < t in [0, T] and checks that every boundary
// sample of C(t) lies in C(s) within 1e-9.
bool verify_decreasing(const Multifunction& mf, double horizon, int pairs,
                       std::uint64_t seed);

// N x (n+1) x m array of scheme states, plus the pre-projection points
// H_j = X_{j-1} + b(X_{j-1}) delta + sigma(X_{j-1}) Z_j when requested
// (H_0 is stored as x0).
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, int copies, int dim, std::uint64_t seed,
               bool keep_h);

  const TimeGrid& grid() const noexcept { return grid_; }
  int copies() const noexcept { return copies_; }
  int dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool has_h() const noexcept { return !pre_projection_.empty(); }

  // Copy `i` is 0-based here; it was simulated with stream index i + 1.
  Eigen::Map<const Vector> state(int i, int j) const;
  Eigen::Map<Vector> state(int i, int j);
  Eigen::Map<const Vector> pre_projection(int i, int j) const;
  Eigen::Map<Vector> pre_projection(int i, int j);

  // All N states at time index j.
  std::vector<Vector> slice(int j) const;

  const std::vector<double>& raw_states() const noexcept { return states_; }

 private:
  std::size_t offset(int i, int j) const;

  TimeGrid grid_;
  int copies_;
  int dim_;
  std::uint64_t seed_;
  std::vector<double> states_;
  std::vector<double> pre_projection_;
};

// n x m matrix of i.i.d. N(0, delta) entries; row j is the increment over
// step j -> j+1. Bit-identical for identical arguments.
Matrix gaussian_increments(std::uint64_t seed, std::uint64_t copy_index, int n,
                           int m, double delta);

struct StepResult {
  Vector pre_projection;
  Vector next;
};

// One projected Euler step onto `body_next` with increment z.
StepResult euler_step(const SdeModel& model, const ConvexBody& body_next,
                      const Vector& x, const Vector& z, double delta);

struct Path {
  std::vector<Vector> states;
  std::vector<Vector> pre_projection;  // empty unless keep_h
};

Path simulate_path(const SdeModel& model, const Multifunction& mf,
                   const TimeGrid& grid, std::uint64_t seed,
                   std::uint64_t copy_index, bool keep_h);

// Copies i = 1..N use stream (seed, i). `threads` = 0 picks the hardware
// concurrency; the result does not depend on it.
PathEnsemble simulate_ensemble(const SdeModel& model, const Multifunction& mf,
                               const TimeGrid& grid, int copies,
                               std::uint64_t seed, bool keep_h,
                               unsigned threads = 0);

}  // namespace skorohull::dynamics
