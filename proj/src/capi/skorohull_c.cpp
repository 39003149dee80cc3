#include "skorohull/skorohull.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <string>

#include "skorohull/errors.hpp"
#include "skorohull/geometry.hpp"
#include "skorohull/harness.hpp"

struct sh_experiment {
  skorohull::harness::ExperimentConfig config;
  std::string text;
};

struct sh_report {
  skorohull::harness::ConvergenceReport report;
};

namespace {

thread_local std::string g_last_error;

sh_status status_of(skorohull::ErrorKind kind) {
  using skorohull::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SH_INVALID_ARGUMENT;
    case ErrorKind::kDimensionMismatch: return SH_DIMENSION_MISMATCH;
    case ErrorKind::kNotConverged: return SH_NOT_CONVERGED;
    case ErrorKind::kSingularMatrix: return SH_SINGULAR_MATRIX;
    case ErrorKind::kContainment: return SH_CONTAINMENT;
    case ErrorKind::kValidation: return SH_VALIDATION;
    case ErrorKind::kIo: return SH_IO;
    case ErrorKind::kRuntime: return SH_RUNTIME;
  }
  return SH_RUNTIME;
}

sh_status fail(sh_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes at the boundary.
template <typename Fn>
sh_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SH_OK;
  } catch (const skorohull::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SH_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(SH_RUNTIME, e.what());
  }
}

sh_status null_argument(const char* name) {
  return fail(SH_INVALID_ARGUMENT, std::string(name) + " is null");
}

skorohull::Vector to_vector(const double* data, size_t n) {
  return Eigen::Map<const skorohull::Vector>(data, static_cast<Eigen::Index>(n));
}

constexpr const char* kSuiteNames[] = {"E1", "E2", "E3", "E4"};

}  // namespace

extern "C" {

const char* sh_last_error(void) { return g_last_error.c_str(); }

const char* sh_version(void) { return "0.1.0"; }

sh_status sh_experiment_load(const char* path, sh_experiment** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new sh_experiment{skorohull::harness::load_config(path), {}}; });
}

sh_status sh_experiment_parse(const char* text, sh_experiment** out) {
  if (text == nullptr) return null_argument("text");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new sh_experiment{skorohull::harness::parse_config(text), {}}; });
}

sh_status sh_experiment_default(const char* name, uint64_t seed, sh_experiment** out) {
  if (name == nullptr) return null_argument("name");
  if (out == nullptr) return null_argument("out");
  auto config = skorohull::harness::default_experiment(name, seed);
  if (!config) return fail(SH_VALIDATION, std::string("unknown default experiment: ") + name);
  return guarded([&] { *out = new sh_experiment{std::move(*config), {}}; });
}

size_t sh_default_suite_size(void) { return std::size(kSuiteNames); }

const char* sh_default_suite_name(size_t index) {
  return index < std::size(kSuiteNames) ? kSuiteNames[index] : nullptr;
}

sh_status sh_experiment_set(sh_experiment* exp, const char* key, const char* value) {
  if (exp == nullptr) return null_argument("experiment");
  if (key == nullptr || value == nullptr) return null_argument("key/value");
  return guarded([&] { skorohull::harness::apply_setting(exp->config, key, value); });
}

sh_status sh_experiment_set_seed(sh_experiment* exp, uint64_t seed) {
  if (exp == nullptr) return null_argument("experiment");
  exp->config.seed = seed;
  return SH_OK;
}

sh_status sh_experiment_set_check(sh_experiment* exp, int enabled) {
  if (exp == nullptr) return null_argument("experiment");
  exp->config.step1_check = enabled != 0;
  return SH_OK;
}

sh_status sh_experiment_validate(const sh_experiment* exp) {
  if (exp == nullptr) return null_argument("experiment");
  return guarded([&] { skorohull::harness::validate(exp->config); });
}

const char* sh_experiment_name(const sh_experiment* exp) {
  return exp == nullptr ? "" : exp->config.name.c_str();
}

const char* sh_experiment_format(sh_experiment* exp) {
  if (exp == nullptr) return "";
  exp->text = skorohull::harness::format_config(exp->config);
  return exp->text.c_str();
}

void sh_experiment_free(sh_experiment* exp) { delete exp; }

sh_status sh_experiment_run(const sh_experiment* exp, sh_report** out) {
  if (exp == nullptr) return null_argument("experiment");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new sh_report{skorohull::harness::run_experiment(exp->config)}; });
}

size_t sh_report_row_count(const sh_report* report) {
  return report == nullptr ? 0 : report->report.rows.size();
}

sh_status sh_report_row(const sh_report* report, size_t index, size_t* copies, int* replication,
                        int* time_index, int* probe_index, double* error, double* scaled,
                        uint64_t* seed) {
  if (report == nullptr) return null_argument("report");
  if (index >= report->report.rows.size()) return fail(SH_INVALID_ARGUMENT, "row index out of range");
  const auto& row = report->report.rows[index];
  if (copies) *copies = row.copies;
  if (replication) *replication = row.replication;
  if (time_index) *time_index = row.time_index;
  if (probe_index) *probe_index = row.probe_index;
  if (error) *error = row.error;
  if (scaled) *scaled = row.scaled_error.value_or(std::numeric_limits<double>::quiet_NaN());
  if (seed) *seed = row.seed;
  return SH_OK;
}

sh_status sh_report_step1(const sh_report* report, size_t* checks, size_t* violations) {
  if (report == nullptr) return null_argument("report");
  const auto& step1 = report->report.diagnostics.step1;
  if (!step1) return fail(SH_VALIDATION, "report was run without diagnostics");
  if (checks) *checks = step1->checks;
  if (violations) *violations = step1->violations;
  return SH_OK;
}

sh_status sh_report_min_hitting(const sh_report* report, double* frequency) {
  if (report == nullptr) return null_argument("report");
  if (frequency == nullptr) return null_argument("frequency");
  const auto& hits = report->report.diagnostics.hitting;
  if (hits.empty()) return fail(SH_VALIDATION, "report was run without diagnostics");
  double lowest = hits.front().frequency;
  for (const auto& h : hits) lowest = std::min(lowest, h.frequency);
  *frequency = lowest;
  return SH_OK;
}

sh_status sh_report_write_csv(const sh_report* report, const char* path) {
  if (report == nullptr) return null_argument("report");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    skorohull::harness::write_file(path, skorohull::harness::report_csv(report->report));
  });
}

sh_status sh_report_write_json(const sh_report* report, const char* path) {
  if (report == nullptr) return null_argument("report");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    skorohull::harness::write_file(path, skorohull::harness::report_json(report->report));
  });
}

void sh_report_free(sh_report* report) { delete report; }

sh_status sh_project(const char* kind, size_t dim, const double* a, const double* b,
                     const double* x, double* out) {
  if (kind == nullptr || a == nullptr || b == nullptr || x == nullptr || out == nullptr) {
    return null_argument("argument");
  }
  if (dim == 0) return fail(SH_INVALID_ARGUMENT, "dimension must be positive");
  return guarded([&] {
    using skorohull::geometry::ConvexBody;
    const std::string k = kind;
    const auto body = [&] {
      if (k == "interval") {
        skorohull::require(dim == 1, "interval needs dimension 1");
        return ConvexBody::interval(a[0], b[0]);
      }
      if (k == "box") return ConvexBody::box(to_vector(a, dim), to_vector(b, dim));
      if (k == "ball") return ConvexBody::ball(to_vector(a, dim), b[0]);
      throw skorohull::InvalidArgument("unknown body kind: " + k);
    }();
    const auto p = skorohull::geometry::project(body, to_vector(x, dim));
    std::copy(p.data(), p.data() + p.size(), out);
  });
}

sh_status sh_hull_distance(size_t dim, size_t count, const double* points, const double* x,
                           double* distance) {
  if (points == nullptr || x == nullptr || distance == nullptr) return null_argument("argument");
  if (dim == 0 || count == 0) return fail(SH_INVALID_ARGUMENT, "empty point cloud");
  return guarded([&] {
    std::vector<skorohull::Vector> cloud;
    cloud.reserve(count);
    for (size_t i = 0; i < count; ++i) cloud.push_back(to_vector(points + i * dim, dim));
    const auto hull = skorohull::geometry::convex_hull(std::move(cloud));
    *distance = skorohull::geometry::distance_to_hull(hull, to_vector(x, dim));
  });
}

}  // extern "C"
