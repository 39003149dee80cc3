#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "skorohull/errors.hpp"
#include "skorohull/estimation.hpp"
#include "skorohull/harness.hpp"
#include "skorohull/rng.hpp"

namespace skorohull::harness {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<Vector> step1_probes(const ExperimentConfig& c) {
  const auto mf = build_multifunction(c);
  const dynamics::TimeGrid grid(c.horizon, c.steps);
  const auto body = mf(grid.node(grid.steps()));
  Vector center = Vector::Zero(body.dim());
  double radius = 0.0;
  if (const auto* s = std::get_if<geometry::Interval>(&body.shape())) {
    center[0] = 0.5 * (s->lo + s->hi);
    radius = 0.5 * (s->hi - s->lo);
  } else if (const auto* s = std::get_if<geometry::Ball>(&body.shape())) {
    center = s->center;
    radius = s->radius;
  } else if (const auto* s = std::get_if<geometry::Box>(&body.shape())) {
    center = 0.5 * (s->lo + s->hi);
    radius = 0.5 * (s->hi - s->lo).minCoeff();
  } else {
    for (const auto& v : body.vertices()) center += v;
    center /= static_cast<double>(body.vertices().size());
    radius = geometry::depth(body, center);
  }
  std::vector<Vector> probes{center};
  std::vector<double> fractions{0.8};
  if (body.dim() == 1) fractions.push_back(0.4);
  for (double f : fractions) {
    for (int i = 0; i < body.dim(); ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector p = center;
        p[i] += sign * f * radius;
        probes.push_back(std::move(p));
      }
    }
  }
  return probes;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile of an empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RateFit rate_fit(const std::vector<double>& copies, const std::vector<double>& errors) {
  require(copies.size() == errors.size(), "rate fit needs matching lists");
  require(copies.size() >= 3, "rate fit needs at least three points");
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < copies.size(); ++i) {
    require(copies[i] > 0.0, "copy counts must be positive");
    require(errors[i] >= 0.0, "errors must be nonnegative");
    if (errors[i] == 0.0) {
      fit.excluded.push_back(i);
      fit.warning = true;
      continue;
    }
    xs.push_back(std::log(copies[i]));
    ys.push_back(std::log(errors[i]));
  }
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 0.0, "rate fit needs distinct copy counts");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double residual = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    residual += r * r;
  }
  fit.slope = slope;
  fit.residual = residual;
  return fit;
}

ConvergenceReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto model = build_model(config);
  const auto mf = build_multifunction(config);
  const dynamics::TimeGrid grid(config.horizon, config.steps);
  const auto probes = resolved_probes(config);
  const bool one_dim = model.dim == 1;

  std::map<int, geometry::ConvexBody> truth;
  for (int j : config.time_indices) truth.emplace(j, mf(grid.node(j)));

  ConvergenceReport report;
  report.config = config;
  for (int copies : config.copy_grid) {
    const auto n_copies = static_cast<std::size_t>(copies);
    for (int r = 0; r < config.replications; ++r) {
      const std::uint64_t seed = derive_seed(config.seed, n_copies, r);
      int current_j = 0;
      try {
        const auto ensemble = dynamics::simulate_ensemble(model, mf, grid, copies, seed,
                                                          config.keep_h);
        for (int j : config.time_indices) {
          current_j = j;
          const auto estimate = estimation::hull_estimate(ensemble, j);
          if (one_dim) {
            const double e = estimation::hausdorff_error_1d(estimate, truth.at(j));
            report.rows.push_back({n_copies, r, j, -1, e, static_cast<double>(copies) * e, seed});
          } else {
            for (std::size_t p = 0; p < probes.size(); ++p) {
              const double e = estimation::pointwise_error(estimate, probes[p]);
              report.rows.push_back({n_copies, r, j, static_cast<int>(p), e, std::nullopt, seed});
            }
          }
        }
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("N={} r={} j={}: {}", copies, r, current_j, e.what()));
      }
    }
  }

  // Aggregate by (j, probe, N); rows are already in (N, r, j, probe) order.
  std::map<std::tuple<int, int, std::size_t>, std::vector<const ErrorRow*>> cells;
  for (const auto& row : report.rows) {
    cells[{row.time_index, row.probe_index, row.copies}].push_back(&row);
  }
  std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> series;
  for (const auto& [key, rows] : cells) {
    const auto [j, p, n] = key;
    std::vector<double> errors;
    std::vector<double> scaled;
    for (const auto* row : rows) {
      errors.push_back(row->error);
      if (row->scaled_error) scaled.push_back(*row->scaled_error);
    }
    Summary s;
    s.copies = n;
    s.time_index = j;
    s.probe_index = p;
    s.median = quantile(errors, 0.5);
    s.q10 = quantile(errors, 0.1);
    s.q90 = quantile(errors, 0.9);
    if (!scaled.empty()) s.scaled_median = quantile(scaled, 0.5);
    report.summaries.push_back(s);
    series[{j, p}].first.push_back(static_cast<double>(n));
    series[{j, p}].second.push_back(s.median);
  }
  std::sort(report.summaries.begin(), report.summaries.end(), [](const Summary& a, const Summary& b) {
    return std::tie(a.copies, a.time_index, a.probe_index) <
           std::tie(b.copies, b.time_index, b.probe_index);
  });
  if (config.copy_grid.size() >= 3) {
    for (const auto& [key, data] : series) {
      report.slopes.push_back({key.first, key.second, rate_fit(data.first, data.second)});
    }
  }

  if (config.step1_check) report.diagnostics = run_diagnostics(config);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.timestamp = utc_timestamp();
  return report;
}

Diagnostics run_diagnostics(const ExperimentConfig& config) {
  validate(config);
  const auto model = build_model(config);
  const auto mf = build_multifunction(config);
  const dynamics::TimeGrid grid(config.horizon, config.steps);

  Diagnostics out;
  const auto step_probes = step1_probes(config);
  {
    const auto ensemble = dynamics::simulate_ensemble(
        model, mf, grid, 1000, derive_seed(config.seed, 1000, -1), true);
    out.step1 = oracle::step1_bound_check(model, ensemble, mf, step_probes, 1e-10);
  }

  const auto probes = model.dim == 1 ? step_probes : resolved_probes(config);
  const int copies = 10000;
  const auto ensemble = dynamics::simulate_ensemble(
      model, mf, grid, copies, derive_seed(config.seed, copies, -2), true);
  for (int j : config.time_indices) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double freq = oracle::hitting_frequency(ensemble, mf, j, probes[p], 0.1);
      out.hitting.push_back({j, static_cast<int>(p), 0.1, static_cast<std::size_t>(copies), freq});
    }
  }
  return out;
}

std::vector<ExperimentConfig> default_suite(std::uint64_t seed) {
  std::vector<ExperimentConfig> suite;

  ExperimentConfig e1;
  e1.name = "E1";
  e1.model = {.kind = "ou", .dim = 1, .theta = 1.0, .s = 0.5, .x0 = {0.0}};
  e1.set.kind = "interval";
  e1.set.lo = {-1.0};
  e1.set.hi = {1.0};
  e1.horizon = 1.1;
  e1.steps = 20;
  e1.copy_grid = {100, 1000, 10000};
  e1.replications = 100;
  e1.time_indices = {20};
  suite.push_back(e1);

  ExperimentConfig e2 = e1;
  e2.name = "E2";
  e2.model = {.kind = "state_sigma", .dim = 1, .theta = 0.0, .s0 = 0.3, .s1 = 0.1, .x0 = {0.0}};
  suite.push_back(e2);

  ExperimentConfig e3;
  e3.name = "E3";
  e3.model = {.kind = "brownian", .dim = 2, .s = 0.063, .x0 = {0.0, 0.0}};
  e3.set.kind = "shrinking_ball";
  e3.set.center = {0.0, 0.0};
  e3.set.radius = 0.4;
  e3.set.rate = 0.1;
  e3.horizon = 1.0;
  e3.steps = 20;
  e3.copy_grid = {200, 2000, 20000};
  e3.replications = 100;
  e3.time_indices = {20};
  suite.push_back(e3);

  ExperimentConfig e4 = e3;
  e4.name = "E4";
  e4.model = {.kind = "tanh", .dim = 2, .s = 0.095, .x0 = {0.0, 0.0}};
  e4.set = SetSpec{};
  e4.set.kind = "polytope";
  e4.set.normals = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  e4.set.offsets = {0.3, 0.3, 0.3, 0.3};
  suite.push_back(e4);

  for (std::size_t i = 0; i < suite.size(); ++i) {
    suite[i].seed = mix64(seed + i);
  }
  return suite;
}

std::optional<ExperimentConfig> default_experiment(const std::string& name,
                                                   std::uint64_t seed) {
  for (auto& c : default_suite(seed)) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

}  // namespace skorohull::harness
