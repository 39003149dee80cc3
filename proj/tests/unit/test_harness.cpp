#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "skorohull/errors.hpp"
#include "skorohull/harness.hpp"

namespace skorohull::harness {
namespace {

ExperimentConfig small_1d() {
  auto c = *default_experiment("E1");
  c.name = "small";
  c.copy_grid = {20, 50, 200};
  c.replications = 4;
  c.time_indices = {1, 20};
  return c;
}

ExperimentConfig small_2d() {
  auto c = *default_experiment("E3");
  c.name = "small2d";
  c.copy_grid = {30, 90};
  c.replications = 3;
  c.time_indices = {5, 20};
  return c;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Config, ParsesDottedKeysAndComments) {
  const auto c = parse_config(R"(
# a comment
name = demo
model.kind = tanh
model.dim = 2
model.s = 0.25   # trailing comment
set.kind = polytope
set.normals = 1,0; -1,0; 0,1; 0,-1
set.offsets = 1,1,1,1
grid.T = 0.5
grid.n = 10
experiment.N = 10, 20, 40
experiment.replications = 7
experiment.seed = 18446744073709551615
experiment.j = 10
diagnostics.keep_h = true
)");
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.model.kind, "tanh");
  EXPECT_EQ(c.model.s, 0.25);
  EXPECT_EQ(c.set.normals.size(), 4u);
  EXPECT_EQ(c.set.normals[1], (std::vector<double>{-1, 0}));
  EXPECT_EQ(c.copy_grid, (std::vector<int>{10, 20, 40}));
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_TRUE(c.keep_h);
  EXPECT_FALSE(c.step1_check);
}

TEST(Config, RejectsUnknownKeyAndBadNumber) {
  EXPECT_THROW(parse_config("model.speed = 3\n"), ValidationError);
  EXPECT_THROW(parse_config("grid.n = twenty\n"), ValidationError);
  EXPECT_THROW(parse_config("grid.n\n"), ValidationError);
}

TEST(Config, FormatRoundTrips) {
  for (auto c : default_suite()) {
    c.probes = {{0.1, 0.2}, {1.0 / 3.0, -0.7}};
    c.step1_check = true;
    EXPECT_EQ(parse_config(format_config(c)), c) << c.name;
  }
}

TEST(Config, DefaultSuiteValidates) {
  const auto suite = default_suite();
  ASSERT_EQ(suite.size(), 4u);
  std::set<std::uint64_t> seeds;
  for (const auto& c : suite) {
    EXPECT_NO_THROW(validate(c)) << c.name;
    seeds.insert(c.seed);
  }
  EXPECT_EQ(seeds.size(), 4u);
  EXPECT_EQ(default_suite(7)[2].seed, default_experiment("E3", 7)->seed);
  EXPECT_FALSE(default_experiment("E9").has_value());
}

TEST(Config, ValidationCatchesBrokenInvariants) {
  auto c = small_1d();
  c.copy_grid = {100, 100};
  EXPECT_THROW(validate(c), ValidationError);

  c = small_1d();
  c.time_indices = {0};
  EXPECT_THROW(validate(c), ValidationError);

  c = small_1d();
  c.model.x0 = {1.5};
  EXPECT_THROW(validate(c), ValidationError);

  c = small_2d();
  c.probes = {{0.299, 0.0}};  // inside C(t_20) but closer than the margin
  EXPECT_THROW(validate(c), ValidationError);

  c = small_2d();
  c.probes = {{0.1, 0.1}};
  EXPECT_NO_THROW(validate(c));

  c = small_2d();
  c.model.kind = "levy";
  EXPECT_THROW(validate(c), ValidationError);
}

TEST(Config, DefaultProbesSitAtEightyPercentOfInradius) {
  const auto probes = default_probes(*default_experiment("E3"));
  ASSERT_EQ(probes.size(), 4u);
  for (const auto& p : probes) EXPECT_NEAR(p.norm(), 0.8 * 0.3, 1e-12);
  const auto square = default_probes(*default_experiment("E4"));
  ASSERT_EQ(square.size(), 4u);
  for (const auto& p : square) EXPECT_NEAR(p.lpNorm<Eigen::Infinity>(), 0.24, 1e-9);
}

TEST(Seeds, DistinctAcrossCoordinates) {
  std::set<std::uint64_t> seen;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    for (int r = 0; r < 100; ++r) seen.insert(derive_seed(1, n, r));
  }
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_NE(derive_seed(1, 100, 0), derive_seed(2, 100, 0));
}

TEST(RateFit, ExactPowerLaws) {
  const std::vector<double> n{100, 1000, 10000};
  auto fit = rate_fit(n, {3.0 / 100, 3.0 / 1000, 3.0 / 10000});
  EXPECT_NEAR(*fit.slope, -1.0, 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-20);
  fit = rate_fit(n, {2 / std::sqrt(100.0), 2 / std::sqrt(1000.0), 2 / std::sqrt(10000.0)});
  EXPECT_NEAR(*fit.slope, -0.5, 1e-12);
  fit = rate_fit(n, {0.4, 0.4, 0.4});
  EXPECT_NEAR(*fit.slope, 0.0, 1e-15);
  EXPECT_FALSE(fit.warning);
}

TEST(RateFit, ZeroMedianIsExcludedWithWarning) {
  const auto fit = rate_fit({100, 1000, 10000}, {0.1, 0.01, 0.0});
  EXPECT_TRUE(fit.warning);
  EXPECT_EQ(fit.excluded, (std::vector<std::size_t>{2}));
  EXPECT_NEAR(*fit.slope, -1.0, 1e-12);
  EXPECT_FALSE(rate_fit({1, 2, 3}, {0.0, 0.0, 1.0}).slope.has_value());
  EXPECT_THROW(rate_fit({1, 2}, {1, 1}), InvalidArgument);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({5}, 0.9), 5.0);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.1), 1.0);
}

TEST(RunExperiment, OneRowPerRequestedTimeIndex) {
  auto c = small_1d();
  c.copy_grid = {10};
  c.replications = 1;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].time_index, 1);
  EXPECT_EQ(r.rows[1].time_index, 20);
  EXPECT_TRUE(r.slopes.empty());
}

TEST(RunExperiment, RowCountsMatchBookkeeping) {
  const auto one = run_experiment(small_1d());
  EXPECT_EQ(one.rows.size(), 3u * 4u * 2u);
  const auto two = run_experiment(small_2d());
  EXPECT_EQ(two.rows.size(), 2u * 3u * 2u * 4u);
  EXPECT_EQ(count_lines(report_csv(two)), two.rows.size() + 1);
}

TEST(RunExperiment, SummariesAreOrderedQuantiles) {
  const auto r = run_experiment(small_1d());
  ASSERT_EQ(r.summaries.size(), 3u * 2u);
  for (const auto& s : r.summaries) {
    EXPECT_LE(s.q10, s.median);
    EXPECT_LE(s.median, s.q90);
    ASSERT_TRUE(s.scaled_median.has_value());
  }
  ASSERT_EQ(r.slopes.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.probe_index, -1);
    EXPECT_DOUBLE_EQ(*row.scaled_error, static_cast<double>(row.copies) * row.error);
  }
}

TEST(RunExperiment, ReplicationsUseDistinctStreams) {
  const auto r = run_experiment(small_1d());
  std::set<double> errors;
  std::set<std::uint64_t> seeds;
  for (const auto& row : r.rows) {
    if (row.copies == 20 && row.time_index == 1) errors.insert(row.error);
    seeds.insert(row.seed);
  }
  EXPECT_EQ(errors.size(), 4u);
  EXPECT_EQ(seeds.size(), 12u);
}

TEST(RunExperiment, CsvIsDeterministic) {
  EXPECT_EQ(report_csv(run_experiment(small_2d())), report_csv(run_experiment(small_2d())));
}

TEST(RunExperiment, RejectsInvalidConfig) {
  auto c = small_1d();
  c.copy_grid = {50, 20};
  EXPECT_THROW(run_experiment(c), ValidationError);
}

TEST(Report, EmptyReportIsHeaderOnlyCsv) {
  EXPECT_EQ(report_csv(ConvergenceReport{}), std::string(kCsvHeader) + "\n");
}

TEST(Report, CsvColumns) {
  const auto r = run_experiment(small_2d());
  std::istringstream in(report_csv(r));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "N,replication,j,probe_index,error,scaled_error,seed");
  std::string line;
  std::getline(in, line);
  // scaled_error is empty for m > 1.
  EXPECT_NE(line.find(",,"), std::string::npos);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
}

TEST(Report, JsonRoundTrips) {
  auto c = small_1d();
  c.step1_check = true;
  const auto r = run_experiment(c);
  ASSERT_TRUE(r.diagnostics.step1.has_value());
  EXPECT_EQ(parse_report_json(report_json(r)), r);
  const auto planar = run_experiment(small_2d());
  EXPECT_EQ(parse_report_json(report_json(planar)), planar);
}

TEST(Report, JsonRoundTripsEmptyReport) {
  const ConvergenceReport empty;
  EXPECT_EQ(parse_report_json(report_json(empty)), empty);
  EXPECT_THROW(parse_report_json("{"), ValidationError);
  EXPECT_THROW(parse_report_json("{}"), ValidationError);
}

TEST(Report, WriteFileSurfacesPath) {
  const std::string bad = "/nonexistent-dir/sub/report.csv";
  try {
    write_file(bad, "x");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  const auto path = std::filesystem::temp_directory_path() / "skorohull_write_test.txt";
  write_file(path.string(), "abc\n");
  std::ifstream in(path);
  std::string text;
  std::getline(in, text);
  EXPECT_EQ(text, "abc");
  std::filesystem::remove(path);
}

TEST(Diagnostics, ShippedModelsRespectStepBound) {
  for (auto c : default_suite()) {
    const auto d = run_diagnostics(c);
    ASSERT_TRUE(d.step1.has_value());
    EXPECT_EQ(d.step1->checks, 1000u * 20u * 5u) << c.name;
    EXPECT_EQ(d.step1->violations, 0u) << c.name;
    EXPECT_EQ(d.step1->h_mismatches, 0u) << c.name;
  }
}

}  // namespace
}  // namespace skorohull::harness
