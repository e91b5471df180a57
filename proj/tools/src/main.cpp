#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dvsg/version.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

using dvsg::cli::ConfigError;
using dvsg::cli::Json;
using dvsg::cli::RunOptions;
using dvsg::cli::Scenario;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dvsg");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DV_SEMIGROUP_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void emit(const Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to '" + path + "'");
  out << text;
}

int config_failure(const ConfigError& e, const std::string& path) {
  std::cerr << path << ": " << e.what() << "\n";
  return dvsg::cli::kExitConfig;
}

int run_one(const std::string& scenario_path, const std::string& out_path, const RunOptions& opts) {
  Scenario s;
  try {
    s = dvsg::cli::load_scenario(scenario_path);
  } catch (const ConfigError& e) {
    return config_failure(e, scenario_path);
  }
  const auto outcome = dvsg::cli::run_scenario(s, opts);
  emit(outcome.report, out_path);
  if (outcome.exit_code != 0) {
    for (const auto& t : outcome.report["tasks"])
      if (t.contains("error"))
        std::cerr << scenario_path << ": task " << t["task"].get<std::string>() << ": "
                  << t["error"]["message"].get<std::string>() << "\n";
    if (outcome.report.contains("error"))
      std::cerr << scenario_path << ": " << outcome.report["error"]["message"].get<std::string>() << "\n";
  }
  return outcome.exit_code;
}

int run_many(const std::vector<std::string>& paths, const std::string& out_dir, const RunOptions& opts,
             unsigned jobs) {
  std::filesystem::create_directories(out_dir);
  std::vector<int> codes(paths.size(), 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      const auto stem = std::filesystem::path(paths[i]).stem().string();
      codes[i] = run_one(paths[i], (std::filesystem::path(out_dir) / (stem + ".report.json")).string(), opts);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size()))); ++k)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

// Runs a single task: the scenario's own entry for it when present, else defaults.
int run_task(const std::string& task, const std::string& scenario_path, const std::string& out_path,
             const RunOptions& opts, const Json& overrides) {
  Scenario s;
  try {
    s = dvsg::cli::load_scenario(scenario_path);
    dvsg::cli::TaskSpec spec;
    spec.name = task;
    spec.pointer = "/tasks";
    for (const auto& t : s.tasks)
      if (t.name == task) {
        spec = t;
        break;
      }
    for (const auto& [k, v] : overrides.items()) spec.options[k] = v;
    s.tasks = {spec};
  } catch (const ConfigError& e) {
    return config_failure(e, scenario_path);
  }
  const auto outcome = dvsg::cli::run_scenario(s, opts);
  emit(outcome.report, out_path);
  for (const auto& t : outcome.report["tasks"])
    if (t.contains("error")) std::cerr << scenario_path << ": " << t["error"]["message"].get<std::string>() << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Schrodinger semigroups, Donsker-Varadhan rate functions and Hohenberg-Kohn checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dvsg::kVersion));

  RunOptions opts;
  std::string out_path;
  std::string csv_dir;

  std::vector<std::string> scenarios;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run every task of one or more scenarios");
  run->add_option("scenarios", scenarios, "Scenario JSON files")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_path, "Report file (one scenario) or directory (several)");
  run->add_option("--csv", csv_dir, "Directory for CSV copies of measure-valued outputs");
  run->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--threads", opts.threads, "Monte Carlo threads per scenario")->check(CLI::PositiveNumber);
  run->add_flag("--timings", opts.timings, "Record wall-clock seconds per task");

  std::string scenario;
  double mc_t = 50.0;
  int mc_paths = 20000;
  std::uint64_t mc_seed = 0;
  std::vector<std::pair<std::string, CLI::App*>> single;
  for (const char* name : {"validate", "spectral", "rate", "hk-verify", "hk-invert", "ihk", "mc", "averaging"}) {
    auto* sub = app.add_subcommand(name, std::string("Run only the ") + name + " task of a scenario");
    sub->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_path, "Report file (default stdout)");
    sub->add_option("--csv", csv_dir, "Directory for CSV copies of measure-valued outputs");
    sub->add_option("--threads", opts.threads, "Monte Carlo threads")->check(CLI::PositiveNumber);
    sub->add_flag("--timings", opts.timings, "Record wall-clock seconds");
    if (std::string(name) == "mc") {
      sub->add_option("--t", mc_t, "Time horizon");
      sub->add_option("--paths", mc_paths, "Number of paths");
      sub->add_option("--seed", mc_seed, "Seed (default: scenario seed)");
    }
    single.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dvsg::cli::kExitConfig;
  }
  if (!csv_dir.empty()) opts.csv_dir = csv_dir;

  try {
    if (run->parsed()) {
      if (scenarios.size() == 1) return run_one(scenarios.front(), out_path, opts);
      return run_many(scenarios, out_path.empty() ? "." : out_path, opts, jobs);
    }
    for (const auto& [name, sub] : single) {
      if (!sub->parsed()) continue;
      Json overrides = Json::object();
      if (name == "mc") {
        auto* mc = sub;
        if (mc->count("--t")) overrides["t"] = mc_t;
        if (mc->count("--paths")) overrides["paths"] = mc_paths;
        if (mc->count("--seed")) overrides["seed"] = mc_seed;
      }
      return run_task(name, scenario, out_path, opts, overrides);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dvsg::cli::kExitComputation;
  }
  return 0;
}
