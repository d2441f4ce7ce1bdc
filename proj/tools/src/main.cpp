// main.cpp — oqs command-line entry point

#include <iostream>

#include <CLI11.hpp>

#include "oqs_cli/config.hpp"
#include "oqs_cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace oqs::cli;
  CLI::App app{"Open quantum system observables, perturbation bounds and identity checks"};
  app.set_version_flag("--version", std::string(versions()["oqs"]));
  app.require_subcommand(1, 1);

  std::string config;
  Overrides ov;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  std::string out;
  int m = 0;

  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--workers", workers, "worker threads (0: all cores)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out, "output path prefix");
    sub->add_option("--m", m, "order for check-comb and check-wick")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--workers")) ov.workers = workers;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--out")) ov.out = out;
  if (sub->count("--m")) ov.m = m;

  try {
    const RunConfig cfg = parse_config(sub->get_name(), config, ov);
    return run(cfg, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "oqs: " << e.what() << '\n';
    return kExitConfig;
  }
}
