#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "skorohull/errors.hpp"
#include "skorohull/harness.hpp"

namespace skorohull::harness {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

// JSON has no infinities; the "no checks" sentinel of worst_margin maps to null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const ExperimentConfig& c) {
  return {
      {"name", c.name},
      {"model",
       {{"kind", c.model.kind},
        {"dim", c.model.dim},
        {"theta", c.model.theta},
        {"s", c.model.s},
        {"s0", c.model.s0},
        {"s1", c.model.s1},
        {"x0", c.model.x0}}},
      {"set",
       {{"kind", c.set.kind},
        {"lo", c.set.lo},
        {"hi", c.set.hi},
        {"center", c.set.center},
        {"radius", c.set.radius},
        {"rate", c.set.rate},
        {"normals", c.set.normals},
        {"offsets", c.set.offsets}}},
      {"grid", {{"T", c.horizon}, {"n", c.steps}}},
      {"experiment",
       {{"N", c.copy_grid},
        {"replications", c.replications},
        {"seed", c.seed},
        {"j", c.time_indices},
        {"probes", c.probes},
        {"probe_margin", c.probe_margin}}},
      {"diagnostics", {{"keep_h", c.keep_h}, {"step1", c.step1_check}}},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.name = j.at("name").get<std::string>();
  const auto& m = j.at("model");
  m.at("kind").get_to(c.model.kind);
  m.at("dim").get_to(c.model.dim);
  m.at("theta").get_to(c.model.theta);
  m.at("s").get_to(c.model.s);
  m.at("s0").get_to(c.model.s0);
  m.at("s1").get_to(c.model.s1);
  m.at("x0").get_to(c.model.x0);
  const auto& s = j.at("set");
  s.at("kind").get_to(c.set.kind);
  s.at("lo").get_to(c.set.lo);
  s.at("hi").get_to(c.set.hi);
  s.at("center").get_to(c.set.center);
  s.at("radius").get_to(c.set.radius);
  s.at("rate").get_to(c.set.rate);
  s.at("normals").get_to(c.set.normals);
  s.at("offsets").get_to(c.set.offsets);
  j.at("grid").at("T").get_to(c.horizon);
  j.at("grid").at("n").get_to(c.steps);
  const auto& e = j.at("experiment");
  e.at("N").get_to(c.copy_grid);
  e.at("replications").get_to(c.replications);
  e.at("seed").get_to(c.seed);
  e.at("j").get_to(c.time_indices);
  e.at("probes").get_to(c.probes);
  e.at("probe_margin").get_to(c.probe_margin);
  j.at("diagnostics").at("keep_h").get_to(c.keep_h);
  j.at("diagnostics").at("step1").get_to(c.step1_check);
  return c;
}

json step1_json(const oracle::Step1Report& r) {
  return {{"checks", r.checks},
          {"violations", r.violations},
          {"worst_margin", finite_or_null(r.worst_margin)},
          {"h_mismatches", r.h_mismatches},
          {"constants",
           {{"c1", r.constants.c1},
            {"c2", r.constants.c2},
            {"bound", r.constants.bound},
            {"sup_inv_norm", r.constants.sup_inv_norm},
            {"sup_inv_drift", r.constants.sup_inv_drift}}}};
}

oracle::Step1Report step1_from_json(const json& j) {
  oracle::Step1Report r;
  j.at("checks").get_to(r.checks);
  j.at("violations").get_to(r.violations);
  r.worst_margin = j.at("worst_margin").is_null() ? -std::numeric_limits<double>::infinity()
                                                  : j.at("worst_margin").get<double>();
  j.at("h_mismatches").get_to(r.h_mismatches);
  const auto& k = j.at("constants");
  k.at("c1").get_to(r.constants.c1);
  k.at("c2").get_to(r.constants.c2);
  k.at("bound").get_to(r.constants.bound);
  k.at("sup_inv_norm").get_to(r.constants.sup_inv_norm);
  k.at("sup_inv_drift").get_to(r.constants.sup_inv_drift);
  return r;
}

}  // namespace

std::string report_csv(const ConvergenceReport& report) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : report.rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},", row.copies, row.replication,
                   row.time_index, row.probe_index, row.error);
    if (row.scaled_error) fmt::format_to(std::back_inserter(out), "{}", *row.scaled_error);
    fmt::format_to(std::back_inserter(out), ",{}\n", row.seed);
  }
  return out;
}

std::string report_json(const ConvergenceReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"N", r.copies},
                    {"replication", r.replication},
                    {"j", r.time_index},
                    {"probe_index", r.probe_index},
                    {"error", r.error},
                    {"scaled_error", optional_number(r.scaled_error)},
                    {"seed", r.seed}});
  }
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"N", s.copies},
                         {"j", s.time_index},
                         {"probe_index", s.probe_index},
                         {"median", s.median},
                         {"q10", s.q10},
                         {"q90", s.q90},
                         {"scaled_median", optional_number(s.scaled_median)}});
  }
  json slopes = json::array();
  for (const auto& s : report.slopes) {
    slopes.push_back({{"j", s.time_index},
                      {"probe_index", s.probe_index},
                      {"slope", optional_number(s.fit.slope)},
                      {"residual", s.fit.residual},
                      {"excluded", s.fit.excluded},
                      {"warning", s.fit.warning}});
  }
  json hitting = json::array();
  for (const auto& h : report.diagnostics.hitting) {
    hitting.push_back({{"j", h.time_index},
                       {"probe_index", h.probe_index},
                       {"epsilon", h.epsilon},
                       {"N", h.copies},
                       {"frequency", h.frequency}});
  }
  json doc = {
      {"config", config_json(report.config)},
      {"rows", rows},
      {"summaries", summaries},
      {"slopes", slopes},
      {"diagnostics",
       {{"step1", report.diagnostics.step1 ? step1_json(*report.diagnostics.step1) : json(nullptr)},
        {"hitting", hitting}}},
      {"metadata", {{"wall_seconds", report.wall_seconds}, {"timestamp", report.timestamp}}},
  };
  return doc.dump(2) + "\n";
}

ConvergenceReport parse_report_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed report JSON: {}", e.what()));
  }
  try {
    ConvergenceReport report;
    report.config = config_from_json(doc.at("config"));
    for (const auto& r : doc.at("rows")) {
      report.rows.push_back({r.at("N").get<std::size_t>(), r.at("replication").get<int>(),
                             r.at("j").get<int>(), r.at("probe_index").get<int>(),
                             r.at("error").get<double>(), read_optional(r.at("scaled_error")),
                             r.at("seed").get<std::uint64_t>()});
    }
    for (const auto& s : doc.at("summaries")) {
      report.summaries.push_back({s.at("N").get<std::size_t>(), s.at("j").get<int>(),
                                  s.at("probe_index").get<int>(), s.at("median").get<double>(),
                                  s.at("q10").get<double>(), s.at("q90").get<double>(),
                                  read_optional(s.at("scaled_median"))});
    }
    for (const auto& s : doc.at("slopes")) {
      RateFit fit;
      fit.slope = read_optional(s.at("slope"));
      s.at("residual").get_to(fit.residual);
      s.at("excluded").get_to(fit.excluded);
      s.at("warning").get_to(fit.warning);
      report.slopes.push_back({s.at("j").get<int>(), s.at("probe_index").get<int>(), fit});
    }
    const auto& d = doc.at("diagnostics");
    if (!d.at("step1").is_null()) report.diagnostics.step1 = step1_from_json(d.at("step1"));
    for (const auto& h : d.at("hitting")) {
      report.diagnostics.hitting.push_back({h.at("j").get<int>(), h.at("probe_index").get<int>(),
                                            h.at("epsilon").get<double>(),
                                            h.at("N").get<std::size_t>(),
                                            h.at("frequency").get<double>()});
    }
    doc.at("metadata").at("wall_seconds").get_to(report.wall_seconds);
    doc.at("metadata").at("timestamp").get_to(report.timestamp);
    return report;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("report JSON is missing fields: {}", e.what()));
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace skorohull::harness
