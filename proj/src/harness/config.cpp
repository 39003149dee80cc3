#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "skorohull/errors.hpp"
#include "skorohull/harness.hpp"
#include "skorohull/rng.hpp"

namespace skorohull::harness {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string t = trim(text);
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ValidationError("bad value for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ValidationError("bad boolean for " + key + ": '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

template <class T>
std::vector<T> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

std::vector<std::vector<double>> parse_points(const std::string& key,
                                              const std::string& text) {
  std::vector<std::vector<double>> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ';')) out.push_back(parse_list(key, item));
  return out;
}

std::string join(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ",")); }

std::string join_points(const std::vector<std::vector<double>>& pts) {
  std::vector<std::string> parts;
  for (const auto& p : pts) parts.push_back(join(p));
  return fmt::format("{}", fmt::join(parts, ";"));
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<long>(v.size()));
}

// Centre and inradius of a body (an inscribed ball, not necessarily the
// largest one for polytopes).
std::pair<Vector, double> inscribed_ball(const geometry::ConvexBody& body) {
  const auto& shape = body.shape();
  if (const auto* s = std::get_if<geometry::Interval>(&shape)) {
    return {Vector::Constant(1, 0.5 * (s->lo + s->hi)), 0.5 * (s->hi - s->lo)};
  }
  if (const auto* s = std::get_if<geometry::Ball>(&shape)) return {s->center, s->radius};
  if (const auto* s = std::get_if<geometry::Box>(&shape)) {
    return {0.5 * (s->lo + s->hi), 0.5 * (s->hi - s->lo).minCoeff()};
  }
  Vector centroid = Vector::Zero(body.dim());
  for (const auto& v : body.vertices()) centroid += v;
  centroid /= static_cast<double>(body.vertices().size());
  return {centroid, geometry::depth(body, centroid)};
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& raw_key,
                   const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "name") c.name = trim(value);
  else if (key == "model.kind") c.model.kind = trim(value);
  else if (key == "model.dim") c.model.dim = parse_number<int>(key, value);
  else if (key == "model.theta") c.model.theta = parse_number<double>(key, value);
  else if (key == "model.s") c.model.s = parse_number<double>(key, value);
  else if (key == "model.s0") c.model.s0 = parse_number<double>(key, value);
  else if (key == "model.s1") c.model.s1 = parse_number<double>(key, value);
  else if (key == "model.x0") c.model.x0 = parse_list(key, value);
  else if (key == "set.kind") c.set.kind = trim(value);
  else if (key == "set.lo") c.set.lo = parse_list(key, value);
  else if (key == "set.hi") c.set.hi = parse_list(key, value);
  else if (key == "set.center") c.set.center = parse_list(key, value);
  else if (key == "set.radius") c.set.radius = parse_number<double>(key, value);
  else if (key == "set.rate") c.set.rate = parse_number<double>(key, value);
  else if (key == "set.normals") c.set.normals = parse_points(key, value);
  else if (key == "set.offsets") c.set.offsets = parse_list(key, value);
  else if (key == "grid.T") c.horizon = parse_number<double>(key, value);
  else if (key == "grid.n") c.steps = parse_number<int>(key, value);
  else if (key == "experiment.N") c.copy_grid = parse_int_list<int>(key, value);
  else if (key == "experiment.replications") c.replications = parse_number<int>(key, value);
  else if (key == "experiment.seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "experiment.j") c.time_indices = parse_int_list<int>(key, value);
  else if (key == "experiment.probes") c.probes = parse_points(key, value);
  else if (key == "experiment.probe_margin") c.probe_margin = parse_number<double>(key, value);
  else if (key == "diagnostics.keep_h") c.keep_h = parse_bool(key, value);
  else if (key == "diagnostics.step1") c.step1_check = parse_bool(key, value);
  else throw ValidationError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(number) +
                            ": expected key = value");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("name", c.name);
  put("model.kind", c.model.kind);
  put("model.dim", fmt::format("{}", c.model.dim));
  put("model.theta", fmt::format("{}", c.model.theta));
  put("model.s", fmt::format("{}", c.model.s));
  put("model.s0", fmt::format("{}", c.model.s0));
  put("model.s1", fmt::format("{}", c.model.s1));
  put("model.x0", join(c.model.x0));
  put("set.kind", c.set.kind);
  put("set.lo", join(c.set.lo));
  put("set.hi", join(c.set.hi));
  put("set.center", join(c.set.center));
  put("set.radius", fmt::format("{}", c.set.radius));
  put("set.rate", fmt::format("{}", c.set.rate));
  put("set.normals", join_points(c.set.normals));
  put("set.offsets", join(c.set.offsets));
  put("grid.T", fmt::format("{}", c.horizon));
  put("grid.n", fmt::format("{}", c.steps));
  put("experiment.N", fmt::format("{}", fmt::join(c.copy_grid, ",")));
  put("experiment.replications", fmt::format("{}", c.replications));
  put("experiment.seed", fmt::format("{}", c.seed));
  put("experiment.j", fmt::format("{}", fmt::join(c.time_indices, ",")));
  put("experiment.probes", join_points(c.probes));
  put("experiment.probe_margin", fmt::format("{}", c.probe_margin));
  put("diagnostics.keep_h", c.keep_h ? "true" : "false");
  put("diagnostics.step1", c.step1_check ? "true" : "false");
  return out;
}

dynamics::SdeModel build_model(const ExperimentConfig& c) {
  const auto& m = c.model;
  Vector x0 = m.x0.empty() ? Vector::Zero(m.dim) : to_vector(m.x0);
  if (m.kind == "ou") return dynamics::ornstein_uhlenbeck(m.dim, m.theta, m.s, x0);
  if (m.kind == "brownian") return dynamics::brownian(m.dim, m.s, x0);
  if (m.kind == "tanh") return dynamics::tanh_drift(m.dim, m.s, x0);
  if (m.kind == "state_sigma") {
    return dynamics::state_dependent_sigma(m.dim, m.theta, m.s0, m.s1, x0);
  }
  throw ValidationError("unknown model kind '" + m.kind + "'");
}

dynamics::Multifunction build_multifunction(const ExperimentConfig& c) {
  using geometry::ConvexBody;
  using dynamics::Multifunction;
  const auto& s = c.set;
  if (s.kind == "interval") {
    require(s.lo.size() == 1 && s.hi.size() == 1, "interval needs scalar lo and hi");
    return Multifunction::constant(ConvexBody::interval(s.lo[0], s.hi[0]));
  }
  if (s.kind == "box") {
    return Multifunction::constant(ConvexBody::box(to_vector(s.lo), to_vector(s.hi)));
  }
  if (s.kind == "ball") {
    return Multifunction::constant(ConvexBody::ball(to_vector(s.center), s.radius));
  }
  if (s.kind == "polytope") {
    require(!s.normals.empty(), "polytope needs normals");
    Matrix normals(static_cast<long>(s.normals.size()),
                   static_cast<long>(s.normals.front().size()));
    for (std::size_t r = 0; r < s.normals.size(); ++r) {
      require(s.normals[r].size() == s.normals.front().size(),
              "polytope normal rows must have equal length");
      normals.row(static_cast<long>(r)) = to_vector(s.normals[r]).transpose();
    }
    return Multifunction::constant(ConvexBody::polytope(normals, to_vector(s.offsets)));
  }
  if (s.kind == "shrinking_ball") {
    return Multifunction::shrinking_ball(to_vector(s.center), s.radius, s.rate, c.horizon);
  }
  if (s.kind == "shrinking_box") {
    return Multifunction::shrinking_box(to_vector(s.lo), to_vector(s.hi), s.rate, c.horizon);
  }
  throw ValidationError("unknown set kind '" + s.kind + "'");
}

std::vector<Vector> default_probes(const ExperimentConfig& c) {
  if (c.model.dim == 1 || c.time_indices.empty()) return {};
  const int last = *std::max_element(c.time_indices.begin(), c.time_indices.end());
  const dynamics::TimeGrid grid(c.horizon, c.steps);
  const auto body = build_multifunction(c)(grid.node(last));
  const auto [center, radius] = inscribed_ball(body);
  std::vector<Vector> probes;
  for (int i = 0; i < body.dim(); ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector p = center;
      p[i] += sign * 0.8 * radius;
      probes.push_back(std::move(p));
    }
  }
  return probes;
}

std::vector<Vector> resolved_probes(const ExperimentConfig& c) {
  if (c.model.dim == 1) return {};
  if (c.probes.empty()) return default_probes(c);
  std::vector<Vector> out;
  for (const auto& p : c.probes) out.push_back(to_vector(p));
  return out;
}

void validate(const ExperimentConfig& c) {
  try {
    if (c.copy_grid.empty()) throw ValidationError("experiment.N must not be empty");
    for (std::size_t i = 0; i < c.copy_grid.size(); ++i) {
      if (c.copy_grid[i] < 1) throw ValidationError("copy counts must be >= 1");
      if (i > 0 && c.copy_grid[i] <= c.copy_grid[i - 1]) {
        throw ValidationError("experiment.N must be strictly ascending");
      }
    }
    if (c.replications < 1) throw ValidationError("replications must be >= 1");
    if (c.time_indices.empty()) throw ValidationError("experiment.j must not be empty");
    const dynamics::TimeGrid grid(c.horizon, c.steps);
    for (int j : c.time_indices) {
      if (j < 1 || j > c.steps) {
        throw ValidationError("time index " + std::to_string(j) + " outside 1..n");
      }
    }
    const auto model = build_model(c);
    const auto mf = build_multifunction(c);
    const auto body0 = mf(0.0);
    if (body0.dim() != model.dim) {
      throw ValidationError("model and set dimensions differ");
    }
    if (model.dim == 1 && c.set.kind != "interval") {
      throw ValidationError("one-dimensional experiments need an interval set");
    }
    if (!geometry::contains(body0, model.x0, kGeometryTol)) {
      throw ValidationError("x0 is not in C(0)");
    }
    if (model.dim > 1) {
      if (!(c.probe_margin > 0.0)) throw ValidationError("probe_margin must be > 0");
      const auto probes = resolved_probes(c);
      if (probes.empty()) throw ValidationError("no probe points");
      for (std::size_t p = 0; p < probes.size(); ++p) {
        if (probes[p].size() != model.dim) {
          throw ValidationError("probe " + std::to_string(p) + " has the wrong dimension");
        }
        for (int j : c.time_indices) {
          if (geometry::depth(mf(grid.node(j)), probes[p]) < c.probe_margin) {
            throw ValidationError("probe " + std::to_string(p) +
                                  " is not interior to C(t_j) with the required "
                                  "margin at j = " + std::to_string(j));
          }
        }
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::size_t copies, int replication) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(copies));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(replication)));
  return h;
}

}  // namespace skorohull::harness
