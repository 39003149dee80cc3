#include <cmath>

#include <gtest/gtest.h>

#include "skorohull/dynamics.hpp"
#include "skorohull/errors.hpp"
#include "test_util.hpp"

namespace skorohull::dynamics {
namespace {

using geometry::ConvexBody;
using test::vec;

SdeModel zero_drift_unit_sigma(int dim) { return brownian(dim, 1.0, Vector::Zero(dim)); }

TEST(TimeGrid, NodesAreExact) {
  const TimeGrid g(1.1, 20);
  EXPECT_DOUBLE_EQ(g.delta(), 1.1 / 20);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_EQ(g.node(20), 1.1);
  EXPECT_THROW(g.node(21), InvalidArgument);
  EXPECT_THROW(TimeGrid(0.0, 20), InvalidArgument);
  EXPECT_THROW(TimeGrid(1.0, 0), InvalidArgument);
}

TEST(EulerStep, InteriorStepIsUnprojected) {
  const auto r = euler_step(zero_drift_unit_sigma(1), ConvexBody::interval(-1, 1), vec({0}),
                            vec({0.3}), 0.01);
  EXPECT_DOUBLE_EQ(r.pre_projection[0], 0.3);
  EXPECT_DOUBLE_EQ(r.next[0], 0.3);
}

TEST(EulerStep, OvershootIsClamped) {
  const auto r = euler_step(zero_drift_unit_sigma(1), ConvexBody::interval(-1, 1), vec({0.9}),
                            vec({0.5}), 0.01);
  EXPECT_DOUBLE_EQ(r.pre_projection[0], 1.4);
  EXPECT_DOUBLE_EQ(r.next[0], 1.0);
}

TEST(EulerStep, DriftOnlyStepInBall) {
  const auto model = ornstein_uhlenbeck(2, 1.0, 1.0, Vector::Zero(2));
  const auto r = euler_step(model, ConvexBody::ball(Vector::Zero(2), 1), vec({1, 0}),
                            vec({0, 0}), 0.1);
  EXPECT_NEAR(r.pre_projection[0], 0.9, 1e-15);
  EXPECT_EQ(r.pre_projection[1], 0.0);
  EXPECT_NEAR(r.next[0], 0.9, 1e-15);
}

TEST(Models, StateDependentSigmaNeedsPositiveDiagonal) {
  EXPECT_THROW(state_dependent_sigma(1, 1.0, 0.1, 0.2, Vector::Zero(1)), InvalidArgument);
  const auto m = state_dependent_sigma(1, 0.0, 0.3, 0.1, Vector::Zero(1));
  EXPECT_NEAR(m.diffusion(vec({0.5}))(0, 0), 0.3 + 0.1 * std::tanh(0.5), 1e-15);
}

TEST(Models, CheckedDiffusionRejectsSingularSigma) {
  auto m = brownian(2, 1.0, Vector::Zero(2));
  m.diffusion = [](const Vector&) {
    Matrix s(2, 2);
    s << 1, 2, 2, 4;
    return s;
  };
  EXPECT_THROW(checked_diffusion(m, Vector::Zero(2)), SingularMatrix);
}

TEST(Models, CheckedDiffusionAcceptsTinyScalarSigma) {
  const auto m = brownian(3, 1e-12, Vector::Zero(3));
  EXPECT_NO_THROW(checked_diffusion(m, Vector::Zero(3)));
}

TEST(Models, DeclaredLipschitzConstantsHold) {
  const Vector lo = Vector::Constant(2, -2.0);
  const Vector hi = Vector::Constant(2, 2.0);
  for (const auto& m : {ornstein_uhlenbeck(2, 1.5, 0.5, Vector::Zero(2)),
                        brownian(2, 0.3, Vector::Zero(2)), tanh_drift(2, 0.3, Vector::Zero(2)),
                        state_dependent_sigma(2, 1.0, 0.3, 0.1, Vector::Zero(2))}) {
    const auto [drift, diffusion] = lipschitz_ratios(m, lo, hi, 1000, 3);
    EXPECT_LE(drift, 1 + 1e-6) << m.name;
    EXPECT_LE(diffusion, 1 + 1e-6) << m.name;
  }
}

TEST(Multifunction, ShrinkingBallIsDecreasing) {
  const auto mf = Multifunction::shrinking_ball(Vector::Zero(2), 1.0, 0.25, 1.0);
  EXPECT_TRUE(mf.decreasing());
  EXPECT_TRUE(verify_decreasing(mf, 1.0, 100, 1));
  const auto& b = std::get<geometry::Ball>(mf(1.0).shape());
  EXPECT_DOUBLE_EQ(b.radius, 0.75);
  EXPECT_THROW(Multifunction::shrinking_ball(Vector::Zero(2), 1.0, 1.0, 1.0), InvalidArgument);
}

TEST(Multifunction, ShrinkingBoxIsDecreasing) {
  const auto mf = Multifunction::shrinking_box(vec({-1, -1}), vec({1, 1}), 0.2, 1.0);
  EXPECT_TRUE(verify_decreasing(mf, 1.0, 100, 2));
}

TEST(Multifunction, GrowingPiecesFailDecreasingCheck) {
  const auto mf = Multifunction::piecewise_constant(
      {{0.0, ConvexBody::interval(-1, 1)}, {0.5, ConvexBody::interval(-2, 2)}}, false);
  EXPECT_FALSE(verify_decreasing(mf, 1.0, 100, 3));
}

TEST(Multifunction, UniformBoundOfConstantSquare) {
  const auto mf = Multifunction::constant(ConvexBody::box(vec({-1, -1}), vec({1, 1})));
  EXPECT_NEAR(uniform_bound(mf, TimeGrid(1.0, 20)), std::sqrt(2.0), 1e-15);
}

TEST(GaussianIncrements, DeterministicPerCopy) {
  EXPECT_EQ(gaussian_increments(9, 4, 20, 2, 0.05), gaussian_increments(9, 4, 20, 2, 0.05));
  EXPECT_NE(gaussian_increments(9, 4, 20, 2, 0.05), gaussian_increments(9, 5, 20, 2, 0.05));
}

TEST(GaussianIncrements, MomentsAtDeltaOnePercent) {
  const Matrix z = gaussian_increments(123, 1, 1000000, 1, 0.01);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (z.size() - 1);
  EXPECT_GT(mean, -4e-4);
  EXPECT_LT(mean, 4e-4);
  EXPECT_GT(var, 0.01 * 0.99);
  EXPECT_LT(var, 0.01 * 1.01);
}

TEST(SimulatePath, SingleStepUnrolls) {
  const auto model = zero_drift_unit_sigma(1);
  const auto mf = Multifunction::constant(ConvexBody::interval(-1, 1));
  const TimeGrid grid(1.0, 1);
  for (std::uint64_t copy = 1; copy <= 20; ++copy) {
    const auto path = simulate_path(model, mf, grid, 77, copy, true);
    const double z = gaussian_increments(77, copy, 1, 1, 1.0)(0, 0);
    EXPECT_DOUBLE_EQ(path.states[1][0], std::clamp(z, -1.0, 1.0));
    EXPECT_DOUBLE_EQ(path.pre_projection[1][0], z);
  }
}

TEST(SimulatePath, TinySigmaFreezesThePath) {
  const auto model = brownian(2, 1e-12, vec({0.3, -0.2}));
  const auto mf = Multifunction::constant(ConvexBody::ball(Vector::Zero(2), 1));
  const auto path = simulate_path(model, mf, TimeGrid(1.0, 20), 5, 1, false);
  for (const auto& x : path.states) EXPECT_LE((x - model.x0).norm(), 1e-9);
}

TEST(SimulatePath, RejectsStartOutsideC0) {
  const auto model = brownian(1, 1.0, vec({2}));
  const auto mf = Multifunction::constant(ConvexBody::interval(-1, 1));
  EXPECT_THROW(simulate_path(model, mf, TimeGrid(1.0, 5), 1, 1, false), ContainmentError);
}

TEST(SimulateEnsemble, StatesStayInsideMovingSets) {
  const auto model = ornstein_uhlenbeck(2, 1.0, 0.8, Vector::Zero(2));
  const auto mf = Multifunction::shrinking_ball(Vector::Zero(2), 1.0, 0.5, 1.0);
  const TimeGrid grid(1.0, 20);
  const auto ens = simulate_ensemble(model, mf, grid, 500, 11, true);
  const double bound = uniform_bound(mf, grid);
  for (int j = 0; j <= grid.steps(); ++j) {
    const auto body = mf(grid.node(j));
    for (int i = 0; i < ens.copies(); ++i) {
      EXPECT_TRUE(geometry::contains(body, ens.state(i, j), 1e-9));
      EXPECT_LE(ens.state(i, j).norm(), bound + 1e-9);
    }
  }
}

TEST(SimulateEnsemble, IntervalPathsNeverLeave) {
  const auto model = ornstein_uhlenbeck(1, 1.0, 2.0, vec({0.5}));
  const auto mf = Multifunction::constant(ConvexBody::interval(-1, 1));
  const auto ens = simulate_ensemble(model, mf, TimeGrid(1.0, 20), 2000, 3, false);
  for (double v : ens.raw_states()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(SimulateEnsemble, PrefixCopiesAreStable) {
  const auto model = tanh_drift(2, 0.5, Vector::Zero(2));
  const auto mf = Multifunction::constant(ConvexBody::box(vec({-1, -1}), vec({1, 1})));
  const TimeGrid grid(1.0, 10);
  const auto small = simulate_ensemble(model, mf, grid, 3, 99, false);
  const auto large = simulate_ensemble(model, mf, grid, 5, 99, false);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= 10; ++j) EXPECT_EQ(small.state(i, j), large.state(i, j));
  }
}

TEST(SimulateEnsemble, ThreadCountDoesNotChangeResult) {
  const auto model = state_dependent_sigma(1, 1.0, 0.3, 0.1, Vector::Zero(1));
  const auto mf = Multifunction::constant(ConvexBody::interval(-1, 1));
  const TimeGrid grid(1.0, 20);
  const auto one = simulate_ensemble(model, mf, grid, 1000, 8, true, 1);
  const auto four = simulate_ensemble(model, mf, grid, 1000, 8, true, 4);
  EXPECT_EQ(one.raw_states(), four.raw_states());
}

TEST(SimulateEnsemble, MeanOfFirstStepMatchesCentralLimitBand) {
  const auto model = zero_drift_unit_sigma(1);
  const auto mf = Multifunction::constant(ConvexBody::interval(-10, 10));
  const TimeGrid grid(1.0, 20);
  const int n = 100000;
  const auto ens = simulate_ensemble(model, mf, grid, n, 1234, false);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += ens.state(i, 1)[0];
  EXPECT_LE(std::abs(sum / n), 4 * std::sqrt(grid.delta() / n));
}

TEST(SimulateEnsemble, PreProjectionMatchesEulerFormula) {
  const auto model = ornstein_uhlenbeck(1, 1.0, 0.5, Vector::Zero(1));
  const auto mf = Multifunction::constant(ConvexBody::interval(-1, 1));
  const TimeGrid grid(1.0, 20);
  const auto ens = simulate_ensemble(model, mf, grid, 10, 21, true);
  for (int i = 0; i < 10; ++i) {
    const Matrix z = gaussian_increments(21, static_cast<std::uint64_t>(i) + 1, 20, 1, grid.delta());
    EXPECT_EQ(ens.pre_projection(i, 0), model.x0);
    for (int j = 0; j < 20; ++j) {
      const double x = ens.state(i, j)[0];
      const double h = x - x * grid.delta() + 0.5 * z(j, 0);
      EXPECT_NEAR(ens.pre_projection(i, j + 1)[0], h, 1e-15);
      EXPECT_EQ(ens.state(i, j + 1)[0], std::clamp(ens.pre_projection(i, j + 1)[0], -1.0, 1.0));
    }
  }
}

}  // namespace
}  // namespace skorohull::dynamics
