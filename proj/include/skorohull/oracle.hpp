#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "skorohull/dynamics.hpp"
#include "skorohull/geometry.hpp"

// Independent references and bound calculators. Nothing in here calls the
// projection or hull-distance code it is meant to check.
namespace skorohull::oracle {

// Constants of the one-step bound
//   ||H_{j+1} - x|| <= c1 ||X_j - x|| + c2 ||sigma(x) Z_{j+1} + b(x) delta||.
struct StepConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double bound = 0.0;          // m_C
  double sup_inv_norm = 0.0;   // sup ||sigma(v)^-1||_op over ||v|| <= m_C
  double sup_inv_drift = 0.0;  // sup ||sigma(v)^-1||_op ||b(v)||

  bool operator==(const StepConstants&) const = default;
};

// The suprema are sample maxima over `probe_count` uniform draws in the
// radius-m_C ball plus the centre and the points +-m_C e_i, so they are lower
// bounds of the true suprema. For constant sigma the Lipschitz factor zeroes
// them out and the constants are exact.
StepConstants step_constants(const dynamics::SdeModel& model, double bound,
                             double delta, int probe_count,
                             std::uint64_t seed = 0x5eed);

// Grid search over the body's bounding box (m <= 2): on each axis-parallel
// grid line with spacing `resolution`, the feasible segment is located by
// bisection on membership and x is clamped onto it. Uses no projection code.
// Within resolution * sqrt(m) of the projection for bodies without slivers
// thinner than the grid.
Vector brute_force_projection(const geometry::ConvexBody& body, const Vector& x,
                              double resolution);

// Distance from x to conv(points) in the plane: zero inside some triangle of
// the cloud, otherwise the smallest point-to-segment distance over all pairs.
// `grid_per_axis` is reserved for a sampling oracle in higher dimension.
double brute_force_hull_distance(std::span<const Vector> points, const Vector& x,
                                 int grid_per_axis = 0);

double empirical_cdf(std::span<const double> samples, double x);

// Same, on samples sorted ascending.
double sorted_empirical_cdf(std::span<const double> sorted, double x);

// Dvoretzky-Kiefer-Wolfowitz half-width at confidence 1 - alpha.
double dkw_band(std::size_t samples, double alpha);

// Standard normal CDF by Marsaglia's Taylor series (|x| <= 7) and a Lentz
// continued fraction for the tails. Independent of std::erf.
double normal_cdf_reference(double x);

struct Step1Report {
  std::size_t checks = 0;
  std::size_t violations = 0;
  // max over checks of lhs - rhs (negative when every check has room).
  double worst_margin = -std::numeric_limits<double>::infinity();
  // Steps whose stored H did not match the one rebuilt from the stream.
  std::size_t h_mismatches = 0;
  StepConstants constants;

  bool operator==(const Step1Report&) const = default;
};

// Checks the one-step bound for every copy, step and probe. Requires an
// ensemble simulated with keep_h and probes inside C(t_{j+1}) for every j.
Step1Report step1_bound_check(const dynamics::SdeModel& model,
                              const dynamics::PathEnsemble& ensemble,
                              const dynamics::Multifunction& mf,
                              std::span<const Vector> probes, double slack,
                              const StepConstants& constants);

// As above with constants from step_constants(model, m_C, delta, 4096).
Step1Report step1_bound_check(const dynamics::SdeModel& model,
                              const dynamics::PathEnsemble& ensemble,
                              const dynamics::Multifunction& mf,
                              std::span<const Vector> probes, double slack);

// Fraction of copies with H_j in the closed eps-ball around x and in the
// interior of C(t_j).
double hitting_frequency(const dynamics::PathEnsemble& ensemble,
                         const dynamics::Multifunction& mf, int j,
                         const Vector& x, double eps);

}  // namespace skorohull::oracle
