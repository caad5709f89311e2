// pullback-lab: runs one experiment and writes <out>.csv and <out>.json.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pullback/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Experiments on principal bundles, pull-backs and parallel transport"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run an experiment");

  std::string experiment;
  std::optional<std::string> config_path, bundle, connection, out;
  std::optional<int> steps, samples;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--config", config_path, "Flat JSON config file");
  run->add_option("--bundle", bundle, "Bundle name");
  run->add_option("--connection", connection, "Connection name");
  run->add_option("--steps", steps, "Integrator steps");
  run->add_option("--samples", samples, "Sample count");
  run->add_option("--tol", tol, "Tolerance");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--out", out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    pullback::ExperimentConfig cfg;
    if (config_path) cfg = pullback::load_config(*config_path, cfg);
    cfg.experiment = experiment;
    if (bundle) cfg.bundle = *bundle;
    if (connection) cfg.connection = *connection;
    if (steps) cfg.steps = *steps;
    if (samples) cfg.samples = *samples;
    if (tol) cfg.tolerance = *tol;
    if (seed) cfg.seed = *seed;

    pullback::ExperimentResult result = pullback::run_experiment(cfg);
    pullback::write_outputs(result, cfg, out ? *out : cfg.experiment + ".csv");
    std::cout << pullback::to_csv(result);
    std::cout << (result.pass ? "PASS " : "FAIL ") << cfg.experiment << '\n';
    return result.pass ? 0 : 1;
  } catch (const pullback::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
