#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skorohull/dynamics.hpp"
#include "skorohull/oracle.hpp"
#include "skorohull/types.hpp"

namespace skorohull::harness {

struct ModelSpec {
  std::string kind = "ou";  // ou | brownian | tanh | state_sigma
  int dim = 1;
  double theta = 1.0;
  double s = 0.5;
  double s0 = 0.3;
  double s1 = 0.1;
  std::vector<double> x0;  // defaults to the origin

  bool operator==(const ModelSpec&) const = default;
};

struct SetSpec {
  // interval | box | ball | polytope | shrinking_ball | shrinking_box
  std::string kind = "interval";
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> center;
  double radius = 1.0;
  double rate = 0.0;
  std::vector<std::vector<double>> normals;
  std::vector<double> offsets;

  bool operator==(const SetSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  SetSpec set;
  double horizon = 1.0;
  int steps = 20;
  std::vector<int> copy_grid;
  int replications = 100;
  std::uint64_t seed = 1;
  std::vector<int> time_indices;
  // Empty means the default interior probes (m > 1 only).
  std::vector<std::vector<double>> probes;
  double probe_margin = 0.05;
  bool keep_h = false;
  bool step1_check = false;

  bool operator==(const ExperimentConfig&) const = default;
};

// Flat "dotted.key = value" text. Lists are comma separated, points within a
// list of points are separated by ';'. '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Applies one key/value override; throws ValidationError on unknown keys.
void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::string& value);
// Canonical key/value form; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

dynamics::SdeModel build_model(const ExperimentConfig& config);
dynamics::Multifunction build_multifunction(const ExperimentConfig& config);

// Probes at 80% of the inradius of C(t_j*) around its centre along +-e_i,
// where j* is the largest requested time index.
std::vector<Vector> default_probes(const ExperimentConfig& config);
std::vector<Vector> resolved_probes(const ExperimentConfig& config);

// Probes of the one-step bound check: the centre of C(t_n) and the points at
// 80% of its inradius along +-e_i, plus +-40% when m = 1 (five either way
// for m <= 2).
std::vector<Vector> step1_probes(const ExperimentConfig& config);

// Throws ValidationError when the config breaks an invariant.
void validate(const ExperimentConfig& config);

// Seed for replication r at copy count N.
std::uint64_t derive_seed(std::uint64_t master, std::size_t copies,
                          int replication);

struct ErrorRow {
  std::size_t copies = 0;
  int replication = 0;
  int time_index = 0;
  int probe_index = -1;  // -1 for the one-dimensional Hausdorff error
  double error = 0.0;
  std::optional<double> scaled_error;  // N d_H when m = 1
  std::uint64_t seed = 0;

  bool operator==(const ErrorRow&) const = default;
};

struct Summary {
  std::size_t copies = 0;
  int time_index = 0;
  int probe_index = -1;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  std::optional<double> scaled_median;

  bool operator==(const Summary&) const = default;
};

struct RateFit {
  std::optional<double> slope;  // empty when fewer than two points survive
  double residual = 0.0;
  std::vector<std::size_t> excluded;  // indices of zero-error points
  bool warning = false;

  bool operator==(const RateFit&) const = default;
};

struct SlopeRow {
  int time_index = 0;
  int probe_index = -1;
  RateFit fit;

  bool operator==(const SlopeRow&) const = default;
};

struct HittingRow {
  int time_index = 0;
  int probe_index = 0;
  double epsilon = 0.0;
  std::size_t copies = 0;
  double frequency = 0.0;

  bool operator==(const HittingRow&) const = default;
};

struct Diagnostics {
  std::optional<oracle::Step1Report> step1;
  std::vector<HittingRow> hitting;

  bool operator==(const Diagnostics&) const = default;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ErrorRow> rows;
  std::vector<Summary> summaries;
  std::vector<SlopeRow> slopes;
  Diagnostics diagnostics;
  // Metadata; only the JSON form carries these.
  double wall_seconds = 0.0;
  std::string timestamp;

  bool operator==(const ConvergenceReport&) const = default;
};

// Least-squares slope of log(error) against log(N). Zero errors are dropped
// and flagged. Needs at least three points.
RateFit rate_fit(const std::vector<double>& copies,
                 const std::vector<double>& errors);

// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

ConvergenceReport run_experiment(const ExperimentConfig& config);

// Oracle diagnostics for --check: the one-step bound over 10^3 copies and
// hitting frequencies (eps = 0.1, 10^4 copies) at every requested j.
Diagnostics run_diagnostics(const ExperimentConfig& config);

std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);
ConvergenceReport parse_report_json(const std::string& text);

// Writes text to path, throwing IoError on failure.
void write_file(const std::string& path, const std::string& text);

inline constexpr const char* kCsvHeader =
    "N,replication,j,probe_index,error,scaled_error,seed";

// The default experiment suite: E1 (1D, constant sigma), E2 (1D,
// state-dependent sigma), E3 (2D shrinking ball), E4 (2D constant square).
std::vector<ExperimentConfig> default_suite(std::uint64_t seed = 20240501);
std::optional<ExperimentConfig> default_experiment(const std::string& name,
                                                   std::uint64_t seed = 20240501);

}  // namespace skorohull::harness
