// Command-line front end: `mfedge run` executes one named experiment from a
// JSON config and writes CSV/plot artifacts; `mfedge validate` checks a
// config without running.  Exit codes: 0 success, 1 numerical/infeasible,
// 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfedge/config.hpp"
#include "mfedge/errors.hpp"
#include "mfedge/experiments.hpp"

namespace {

mfedge::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  return mfedge::config_from_json(j);
}

int print_issues(const std::vector<std::string>& issues) {
  for (const auto& s : issues) std::cerr << "config error: " << s << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field collaboration and offloading toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string experiment_override;
  std::string out_override;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::uint64_t seed_base = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "execute an experiment and write result files");
  run->add_option("--config", config_path, "JSON run configuration")->required();
  run->add_option("--experiment", experiment_override, "override the configured experiment name");
  run->add_option("--seed", seed_base, "rebase the seed list to N, N+1, ...")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--workers", workers, "worker threads for independent sweep points");
  run->add_option("--out", out_override, "output directory (default: $MFEDGE_OUT or config)");

  auto* validate = app.add_subcommand("validate", "check a config file and exit");
  validate->add_option("--config", config_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    mfedge::RunConfig cfg = load_config(config_path);
    if (validate->parsed()) {
      auto issues = mfedge::validate_config(cfg);
      if (!issues.empty()) return print_issues(issues);
      std::cout << "config ok: experiment '" << cfg.experiment << "'\n";
      return 0;
    }

    // flag > file > default
    if (!experiment_override.empty()) cfg.experiment = experiment_override;
    if (seed_given) {
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = seed_base + i;
    }
    std::string out_dir = cfg.output_dir;
    if (const char* env = std::getenv("MFEDGE_OUT")) out_dir = env;
    if (!out_override.empty()) out_dir = out_override;

    auto issues = mfedge::validate_config(cfg);
    if (!issues.empty()) return print_issues(issues);

    auto outcome = mfedge::run_experiment(cfg, out_dir, std::max(1, workers));
    std::cout << "wrote " << outcome.out_dir.string() << '\n';
    for (const auto& w : outcome.warnings) std::cout << "warning: " << w << '\n';
    return 0;
  } catch (const mfedge::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 1;
  } catch (const mfedge::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
