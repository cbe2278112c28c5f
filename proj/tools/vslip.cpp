// Command-line driver: limit-cycle search, closed-loop walking runs and
// model comparisons.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vslip/scenario.hpp"
#include "vslip/trace_io.hpp"

namespace fs = std::filesystem;
using namespace vslip;

namespace {

enum ExitCode { kOk = 0, kGaitFailure = 2, kNonConvergence = 3, kConfigError = 4 };

struct Overrides {
  std::string config;
  std::string out_dir;
  std::string model;
  std::string reference;
  int steps = 0;
};

ScenarioConfig load_config(const std::string& path, const Overrides& o) {
  ScenarioConfig c = path.empty() ? ScenarioConfig{} : ScenarioConfig::load(path);
  try {
    if (!o.model.empty()) c.model = parse_model(o.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.steps > 0) c.n_steps = o.steps;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.reference.empty()) c.reference_file = o.reference;
  c.validate();
  return c;
}

int find_cycle(const Overrides& o) {
  const ScenarioConfig c = load_config(o.config, o);
  LimitCycle cycle;
  try {
    cycle = find_limit_cycle(c.params, c.cycle_guess, c.cycle_options());
  } catch (const NonConvergence& e) {
    spdlog::error("{}", e.what());
    std::cout << "last_iterate.offset = " << format_double(e.last.offset) << "\n"
              << "last_iterate.dq1 = " << format_double(e.last.dq1) << "\n"
              << "last_iterate.dq2 = " << format_double(e.last.dq2) << "\n"
              << "residual = " << format_double(e.residual) << "\n";
    return kNonConvergence;
  } catch (const GaitFailure& e) {
    spdlog::error("no gait: {}", e.what());
    return kGaitFailure;
  }
  ReferenceGait ref;
  try {
    ref = fit_reference(cycle, c.harmonics);
  } catch (const FitError& e) {
    spdlog::error("{}", e.what());
    return kNonConvergence;
  }
  cycle.trace = {};
  const fs::path out = fs::path(c.out_dir) / (c.name + ".reference");
  write_file_atomic(out, serialize_reference({cycle, ref}));
  std::cout << "residual = " << format_double(cycle.residual) << "\n"
            << "period = " << format_double(cycle.T) << "\n"
            << "mean_velocity = " << format_double(cycle.mean_velocity) << "\n"
            << "reference = " << out.string() << "\n";
  return kOk;
}

struct WalkOutput {
  CompareRow row;
  bool failed = false;
};

WalkOutput walk_one(const ScenarioConfig& c) {
  WalkOutput out;
  out.row.name = c.name;
  out.row.model = c.model;
  ReferenceBundle bundle;
  try {
    bundle = prepare_reference(c);
  } catch (const NonConvergence& e) {
    out.row.status = std::string("no limit cycle: ") + e.what();
    out.failed = true;
    return out;
  } catch (const GaitFailure& e) {
    out.row.status = std::string("no gait: ") + e.what();
    out.failed = true;
    return out;
  }
  const ScenarioRun r = run_scenario(c, bundle);
  const fs::path dir(c.out_dir);
  write_file_atomic(dir / (c.name + ".csv"), trace_csv(r.run.trace));
  write_file_atomic(dir / (c.name + ".events.csv"), events_csv(r.run.trace));
  out.row.metrics = r.metrics;
  if (r.run.outcome != RunOutcome::Completed) {
    out.row.status = std::string(to_string(r.run.outcome)) + ": " + r.run.diagnostic;
    out.failed = true;
  } else if (!r.metrics) {
    out.row.status = "metrics unavailable: " + r.metrics_error;
  } else {
    out.row.status = "ok";
  }
  return out;
}

void append_summary(const fs::path& dir, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream(dir / "summary.txt", std::ios::app) << text << "\n";
}

int walk(const Overrides& o) {
  const ScenarioConfig c = load_config(o.config, o);
  const WalkOutput w = walk_one(c);
  if (w.row.metrics) {
    const std::string block = metrics_block(c.name, c.model, *w.row.metrics);
    append_summary(c.out_dir, block);
    std::cout << block;
  }
  if (w.failed) {
    spdlog::error("{}: {}", c.name, w.row.status);
    return kGaitFailure;
  }
  if (!w.row.metrics) spdlog::warn("{}: {}", c.name, w.row.status);
  spdlog::info("{}: trace written to {}", c.name, (fs::path(c.out_dir) / (c.name + ".csv")).string());
  return kOk;
}

int compare(const Overrides& o, const std::vector<std::string>& configs, const std::vector<std::string>& models) {
  std::vector<ScenarioConfig> scenarios;
  for (const auto& path : configs) scenarios.push_back(load_config(path, o));
  if (scenarios.empty()) scenarios.push_back(load_config("", o));
  if (!models.empty()) {
    const std::vector<ScenarioConfig> base = scenarios;
    scenarios.clear();
    for (const auto& b : base)
      for (const auto& m : models) {
        ScenarioConfig c = b;
        try {
          c.model = parse_model(m);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        c.name = b.name + "-" + m;
        scenarios.push_back(c);
      }
  }
  std::vector<std::future<WalkOutput>> jobs;
  for (const auto& s : scenarios) jobs.push_back(std::async(std::launch::async, walk_one, s));
  std::vector<CompareRow> rows;
  bool failed = false;
  for (auto& j : jobs) {
    const WalkOutput w = j.get();
    failed = failed || w.failed;
    rows.push_back(w.row);
  }
  const std::string table = compare_table(rows);
  const fs::path dir = o.out_dir.empty() ? fs::path(scenarios.front().out_dir) : fs::path(o.out_dir);
  write_file_atomic(dir / "compare.csv", table);
  std::cout << table;
  return failed ? kGaitFailure : kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("vslip");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("VSLIP_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(level));
  else spdlog::set_level(spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Compliant walker simulation"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::string> configs, models;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", o.out_dir, "Output directory");
    cmd->add_option("--model", o.model, "slip, vslip, swing or knee");
    cmd->add_option("--steps", o.steps, "Number of steps")->check(CLI::PositiveNumber);
  };
  auto* fc = app.add_subcommand("find-cycle", "Find the passive limit cycle and fit the hip reference");
  fc->add_option("--config", o.config, "Scenario config file");
  add_common(fc);
  auto* wk = app.add_subcommand("walk", "Run a closed-loop simulation");
  wk->add_option("--config", o.config, "Scenario config file");
  wk->add_option("--reference", o.reference, "Reference file from find-cycle");
  add_common(wk);
  auto* cp = app.add_subcommand("compare", "Run several scenarios and tabulate their metrics");
  cp->add_option("--config", configs, "Scenario config files");
  cp->add_option("--models", models, "Run each config once per model")->delimiter(',');
  cp->add_option("--reference", o.reference, "Reference file from find-cycle");
  cp->add_option("--out-dir", o.out_dir, "Output directory");
  cp->add_option("--steps", o.steps, "Number of steps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*fc) return find_cycle(o);
    if (*wk) return walk(o);
    return compare(o, configs, models);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kGaitFailure;
  }
}
