#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "skorohull/dynamics.hpp"
#include "skorohull/errors.hpp"
#include "skorohull/rng.hpp"

namespace skorohull::dynamics {
namespace {

Error annotate(const Error& e, const std::string& where) {
  return Error(e.kind(), where + ": " + e.what());
}

void check_start(const SdeModel& model, const ConvexBody& body0) {
  if (body0.dim() != model.dim) throw DimensionMismatch(model.dim, body0.dim());
  if (!geometry::contains(body0, model.x0, kGeometryTol)) {
    throw ContainmentError("x0 is not in C(0)");
  }
}

// Runs one copy, writing into the ensemble row for copy `i` (0-based).
void run_copy(const SdeModel& model, const std::vector<ConvexBody>& bodies,
              const TimeGrid& grid, std::uint64_t seed, int i,
              PathEnsemble& out) {
  const int m = model.dim;
  const double delta = grid.delta();
  const double scale = std::sqrt(delta);
  NormalStream stream(seed, static_cast<std::uint64_t>(i) + 1);
  Vector x = model.x0;
  Vector z(m);
  out.state(i, 0) = x;
  if (out.has_h()) out.pre_projection(i, 0) = x;
  for (int j = 0; j < grid.steps(); ++j) {
    for (int k = 0; k < m; ++k) z[k] = scale * stream.next();
    StepResult step;
    try {
      step = euler_step(model, bodies[static_cast<std::size_t>(j) + 1], x, z, delta);
    } catch (const Error& e) {
      throw annotate(e, "step j=" + std::to_string(j));
    }
    out.state(i, j + 1) = step.next;
    if (out.has_h()) out.pre_projection(i, j + 1) = step.pre_projection;
    x = std::move(step.next);
  }
}

}  // namespace

PathEnsemble::PathEnsemble(TimeGrid grid, int copies, int dim,
                           std::uint64_t seed, bool keep_h)
    : grid_(grid), copies_(copies), dim_(dim), seed_(seed) {
  require(copies >= 1, "ensemble needs N >= 1 copies");
  require(dim >= 1, "ensemble dimension must be >= 1");
  const std::size_t size = static_cast<std::size_t>(copies) *
                           (static_cast<std::size_t>(grid.steps()) + 1) *
                           static_cast<std::size_t>(dim);
  states_.assign(size, 0.0);
  if (keep_h) pre_projection_.assign(size, 0.0);
}

std::size_t PathEnsemble::offset(int i, int j) const {
  require(i >= 0 && i < copies_, "copy index out of range");
  require(j >= 0 && j <= grid_.steps(), "time index out of range");
  return (static_cast<std::size_t>(i) * (static_cast<std::size_t>(grid_.steps()) + 1) +
          static_cast<std::size_t>(j)) *
         static_cast<std::size_t>(dim_);
}

Eigen::Map<const Vector> PathEnsemble::state(int i, int j) const {
  return {states_.data() + offset(i, j), dim_};
}

Eigen::Map<Vector> PathEnsemble::state(int i, int j) {
  return {states_.data() + offset(i, j), dim_};
}

Eigen::Map<const Vector> PathEnsemble::pre_projection(int i, int j) const {
  require(has_h(), "ensemble was simulated without pre-projection storage");
  return {pre_projection_.data() + offset(i, j), dim_};
}

Eigen::Map<Vector> PathEnsemble::pre_projection(int i, int j) {
  require(has_h(), "ensemble was simulated without pre-projection storage");
  return {pre_projection_.data() + offset(i, j), dim_};
}

std::vector<Vector> PathEnsemble::slice(int j) const {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(copies_));
  for (int i = 0; i < copies_; ++i) out.emplace_back(state(i, j));
  return out;
}

Matrix gaussian_increments(std::uint64_t seed, std::uint64_t copy_index, int n,
                           int m, double delta) {
  require(n >= 1 && m >= 1, "increment matrix needs n, m >= 1");
  require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
  const double scale = std::sqrt(delta);
  NormalStream stream(seed, copy_index);
  Matrix out(n, m);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) out(j, k) = scale * stream.next();
  }
  return out;
}

StepResult euler_step(const SdeModel& model, const ConvexBody& body_next,
                      const Vector& x, const Vector& z, double delta) {
  if (x.size() != model.dim) throw DimensionMismatch(model.dim, x.size());
  if (z.size() != model.dim) throw DimensionMismatch(model.dim, z.size());
  const Matrix sigma = checked_diffusion(model, x);
  StepResult out;
  out.pre_projection = x + model.drift(x) * delta + sigma * z;
  out.next = geometry::project(body_next, out.pre_projection);
  return out;
}

Path simulate_path(const SdeModel& model, const Multifunction& mf,
                   const TimeGrid& grid, std::uint64_t seed,
                   std::uint64_t copy_index, bool keep_h) {
  const auto bodies = mf.on_grid(grid);
  check_start(model, bodies.front());
  const Matrix z = gaussian_increments(seed, copy_index, grid.steps(), model.dim,
                                       grid.delta());
  Path path;
  path.states.push_back(model.x0);
  if (keep_h) path.pre_projection.push_back(model.x0);
  for (int j = 0; j < grid.steps(); ++j) {
    StepResult step;
    try {
      step = euler_step(model, bodies[static_cast<std::size_t>(j) + 1],
                        path.states.back(), z.row(j).transpose(), grid.delta());
    } catch (const Error& e) {
      throw annotate(e, "step j=" + std::to_string(j));
    }
    if (keep_h) path.pre_projection.push_back(std::move(step.pre_projection));
    path.states.push_back(std::move(step.next));
  }
  return path;
}

PathEnsemble simulate_ensemble(const SdeModel& model, const Multifunction& mf,
                               const TimeGrid& grid, int copies,
                               std::uint64_t seed, bool keep_h,
                               unsigned threads) {
  require(copies >= 1, "ensemble needs N >= 1 copies");
  const auto bodies = mf.on_grid(grid);
  check_start(model, bodies.front());
  PathEnsemble out(grid, copies, model.dim, seed, keep_h);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(copies / 256 + 1));

  auto run_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        run_copy(model, bodies, grid, seed, i, out);
      } catch (const Error& e) {
        throw annotate(e, "copy " + std::to_string(i + 1));
      }
    }
  };

  if (threads <= 1) {
    run_range(0, copies);
    return out;
  }

  // Each worker owns a contiguous block of copies; the first failure (by
  // copy index) is rethrown so errors do not depend on scheduling.
  std::vector<std::exception_ptr> failures(threads);
  std::vector<std::thread> workers;
  const int chunk = (copies + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(t) * chunk;
    const int end = std::min(copies, begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

}  // namespace skorohull::dynamics
