#include <algorithm>
#include <cmath>
#include <random>

#include "skorohull/dynamics.hpp"
#include "skorohull/errors.hpp"

namespace skorohull::dynamics {

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be > 0");
  require(steps >= 1, "step count n must be >= 1");
}

double TimeGrid::node(int j) const {
  require(j >= 0 && j <= steps_, "time index out of range");
  return static_cast<double>(j) * horizon_ / static_cast<double>(steps_);
}

Multifunction::Multifunction(std::string name, Evaluator evaluator,
                             bool decreasing)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      decreasing_(decreasing) {
  require(static_cast<bool>(evaluator_), "multifunction needs an evaluator");
}

Multifunction Multifunction::constant(ConvexBody body) {
  return Multifunction(
      "constant", [body = std::move(body)](double) { return body; }, true);
}

Multifunction Multifunction::shrinking_ball(Vector center, double r0,
                                            double rate, double horizon) {
  require(rate >= 0.0, "shrink rate must be >= 0");
  require(r0 - rate * horizon > 0.0, "ball must keep a positive radius on [0, T]");
  // Validates the center once.
  (void)ConvexBody::ball(center, r0);
  return Multifunction(
      "shrinking_ball",
      [center = std::move(center), r0, rate](double t) {
        return ConvexBody::ball(center, r0 - rate * t);
      },
      true);
}

Multifunction Multifunction::shrinking_box(Vector lo, Vector hi, double rate,
                                           double horizon) {
  require(rate >= 0.0, "shrink rate must be >= 0");
  (void)ConvexBody::box(lo, hi);
  require((hi - lo).minCoeff() > 2.0 * rate * horizon,
          "box must keep positive width on [0, T]");
  return Multifunction(
      "shrinking_box",
      [lo = std::move(lo), hi = std::move(hi), rate](double t) {
        return ConvexBody::box((lo.array() + rate * t).matrix(),
                               (hi.array() - rate * t).matrix());
      },
      true);
}

Multifunction Multifunction::piecewise_constant(
    std::vector<std::pair<double, ConvexBody>> pieces, bool decreasing) {
  require(!pieces.empty(), "piecewise multifunction needs pieces");
  require(pieces.front().first == 0.0, "first piece must start at t = 0");
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    require(pieces[i].first > pieces[i - 1].first,
            "piece start times must be strictly increasing");
    if (pieces[i].second.dim() != pieces[0].second.dim()) {
      throw DimensionMismatch(pieces[0].second.dim(), pieces[i].second.dim());
    }
  }
  return Multifunction(
      "piecewise_constant",
      [pieces = std::move(pieces)](double t) {
        auto it = std::upper_bound(
            pieces.begin(), pieces.end(), t,
            [](double value, const auto& piece) { return value < piece.first; });
        return std::prev(it)->second;
      },
      decreasing);
}

std::vector<ConvexBody> Multifunction::on_grid(const TimeGrid& grid) const {
  std::vector<ConvexBody> bodies;
  bodies.reserve(static_cast<std::size_t>(grid.steps()) + 1);
  for (int j = 0; j <= grid.steps(); ++j) bodies.push_back((*this)(grid.node(j)));
  return bodies;
}

double uniform_bound(const Multifunction& mf, const TimeGrid& grid) {
  double bound = 0.0;
  for (int j = 0; j <= grid.steps(); ++j) {
    bound = std::max(bound, mf(grid.node(j)).max_norm());
  }
  return bound;
}

bool verify_decreasing(const Multifunction& mf, double horizon, int pairs,
                       std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, horizon);
  for (int p = 0; p < pairs; ++p) {
    double s = unit(gen);
    double t = unit(gen);
    if (s > t) std::swap(s, t);
    const ConvexBody earlier = mf(s);
    for (const auto& y : mf(t).boundary_samples()) {
      if (!geometry::contains(earlier, y, 1e-9)) return false;
    }
  }
  return true;
}

}  // namespace skorohull::dynamics
