// Command-line driver: dmnls run|exponents|groundstate|batch.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dmnls/config.hpp"
#include "dmnls/experiments.hpp"
#include "dmnls/exponents.hpp"

namespace {

int report(const dmnls::RunResult& r) {
  for (const auto& c : r.checks)
    std::printf("%-4s %-36s %s%s\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.detail.c_str(),
                c.hard ? "" : " (soft)");
  std::printf("status: %s", r.status.c_str());
  if (!r.failed_stage.empty()) std::printf(" [%s]", r.failed_stage.c_str());
  if (!r.message.empty()) std::printf(" %s", r.message.c_str());
  std::printf("\n");
  return r.exit_code();
}

int run_config(const std::string& path, bool require_ground_state) {
  dmnls::RunConfig cfg;
  try {
    cfg = dmnls::parse_config(path);
  } catch (const dmnls::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return dmnls::exit_config_error;
  }
  if (require_ground_state && cfg.preset != dmnls::Preset::ground_state) {
    std::cerr << path << ": groundstate expects preset = \"ground_state\"\n";
    return dmnls::exit_config_error;
  }
  return report(dmnls::run(cfg));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-managed NLS simulations and checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the preset described by a config file");
  run->add_option("config", config_path, "TOML config")->required();

  int d = 1;
  double p = 4.0;
  auto* exps = app.add_subcommand("exponents", "Print the exponent report for (d, p) as JSON");
  exps->add_option("--d", d, "Space dimension")->required();
  exps->add_option("--p", p, "Nonlinearity power")->required();

  std::string gs_path;
  auto* gs = app.add_subcommand("groundstate", "Optimize the ground-state quotient for a ground_state config");
  gs->add_option("config", gs_path, "TOML config")->required();

  std::string batch_dir;
  int workers = 0;
  auto* batch = app.add_subcommand("batch", "Run every .toml config in a directory");
  batch->add_option("dir", batch_dir, "Directory of configs")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--workers", workers, "Worker count (default: DMNLS_MAX_WORKERS or CPU count)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : dmnls::exit_config_error;
  }

  try {
    if (*run) return run_config(config_path, false);
    if (*gs) return run_config(gs_path, true);
    if (*exps) {
      try {
        std::cout << dmnls::to_json(dmnls::exponent_report(d, p)).dump(2) << "\n";
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return dmnls::exit_config_error;
      }
      return dmnls::exit_pass;
    }
    if (*batch) {
      const int cap = dmnls::worker_cap_from_env();
      const int n = workers > 0 ? std::min(workers, cap) : cap;
      int worst = 0;
      for (const auto& item : dmnls::run_batch(batch_dir, n)) {
        std::printf("%d %s %s\n", item.exit_code, item.config_path.c_str(), item.message.c_str());
        worst = std::max(worst, item.exit_code);
      }
      return worst;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dmnls::exit_runtime_error;
  }
  return dmnls::exit_pass;
}
