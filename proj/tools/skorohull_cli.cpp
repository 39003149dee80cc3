// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skorohull/skorohull.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string config;
  std::vector<std::string> experiments;
  std::vector<std::string> settings;
  uint64_t seed = 0;
  bool has_seed = false;
  std::string out = ".";
  std::string format = "csv";
  bool check = false;
  bool dry_run = false;

  uint64_t suite_seed() const { return has_seed ? seed : 20240501; }
};

int report_failure(const char* stage, int code) {
  std::fprintf(stderr, "skorohull: %s: %s\n", stage, sh_last_error());
  return code;
}

// Loads, overrides and validates one experiment. Any failure up to here is a
// validation error.
int prepare(const Options& opt, const std::string& default_name, sh_experiment** exp) {
  const sh_status loaded = opt.config.empty()
                               ? sh_experiment_default(default_name.c_str(), opt.suite_seed(), exp)
                               : sh_experiment_load(opt.config.c_str(), exp);
  if (loaded != SH_OK) return report_failure("config", loaded == SH_IO ? kExitRuntime : kExitValidation);
  for (const auto& kv : opt.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "skorohull: --set expects key=value, got '%s'\n", kv.c_str());
      return kExitValidation;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (sh_experiment_set(*exp, key.c_str(), value.c_str()) != SH_OK) {
      return report_failure("config", kExitValidation);
    }
  }
  // For the default suite the seed is the suite master seed, already applied.
  if (opt.has_seed && !opt.config.empty()) sh_experiment_set_seed(*exp, opt.seed);
  if (opt.check) sh_experiment_set_check(*exp, 1);
  if (sh_experiment_validate(*exp) != SH_OK) return report_failure("validation", kExitValidation);
  return kExitOk;
}

int run_one(const Options& opt, const std::string& default_name) {
  sh_experiment* exp = nullptr;
  if (const int rc = prepare(opt, default_name, &exp); rc != kExitOk) {
    sh_experiment_free(exp);
    return rc;
  }
  const std::string name = sh_experiment_name(exp);
  if (opt.dry_run) {
    std::fputs(sh_experiment_format(exp), stdout);
    sh_experiment_free(exp);
    return kExitOk;
  }
  sh_report* report = nullptr;
  const sh_status ran = sh_experiment_run(exp, &report);
  sh_experiment_free(exp);
  if (ran != SH_OK) {
    return report_failure(name.c_str(), ran == SH_VALIDATION ? kExitValidation : kExitRuntime);
  }

  int rc = kExitOk;
  const auto base = std::filesystem::path(opt.out) / name;
  if (opt.format == "csv" || opt.format == "both") {
    if (sh_report_write_csv(report, (base.string() + ".csv").c_str()) != SH_OK) {
      rc = report_failure("csv", kExitRuntime);
    }
  }
  if (rc == kExitOk && (opt.format == "json" || opt.format == "both")) {
    if (sh_report_write_json(report, (base.string() + ".json").c_str()) != SH_OK) {
      rc = report_failure("json", kExitRuntime);
    }
  }
  if (rc == kExitOk) {
    std::printf("%s: %zu rows -> %s\n", name.c_str(), sh_report_row_count(report),
                base.string().c_str());
    size_t checks = 0;
    size_t violations = 0;
    if (sh_report_step1(report, &checks, &violations) == SH_OK) {
      double hit = 0.0;
      sh_report_min_hitting(report, &hit);
      std::printf("%s: step-1 bound %zu/%zu violations, min hitting frequency %.4f\n",
                  name.c_str(), violations, checks, hit);
    }
  }
  sh_report_free(report);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hull estimation of reflected diffusions in moving convex sets"};
  app.require_subcommand(1);
  Options opt;

  auto* run = app.add_subcommand("run", "Run one or more experiments and write reports");
  run->add_option("--config", opt.config, "Config file (dotted key = value)");
  run->add_option("--experiment", opt.experiments,
                  "Default experiment(s) to run when no --config is given (E1..E4)");
  run->add_option("--set", opt.settings, "Override a config key, key=value");
  run->add_option("--seed", opt.seed, "Master seed override");
  run->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
  run->add_flag("--check", opt.check, "Also run the oracle diagnostics");
  run->add_flag("--dry-run", opt.dry_run, "Print the resolved config and stop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  opt.has_seed = run->count("--seed") > 0;

  if (!opt.config.empty() && !opt.experiments.empty()) {
    std::fprintf(stderr, "skorohull: --config and --experiment are exclusive\n");
    return kExitValidation;
  }
  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  if (ec) {
    std::fprintf(stderr, "skorohull: %s: %s\n", opt.out.c_str(), ec.message().c_str());
    return kExitRuntime;
  }

  std::vector<std::string> names;
  if (!opt.config.empty()) {
    names.push_back("");
  } else if (!opt.experiments.empty()) {
    names = opt.experiments;
  } else {
    for (size_t i = 0; i < sh_default_suite_size(); ++i) names.push_back(sh_default_suite_name(i));
  }
  for (const auto& name : names) {
    if (const int rc = run_one(opt, name); rc != kExitOk) return rc;
  }
  return kExitOk;
}
