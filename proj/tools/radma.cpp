#include <CLI11.hpp>

#include <iostream>

#include "radma/commands.hpp"
#include "radma/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial Monge-Ampere systems: solve, sweep, verify and classify"};
  app.require_subcommand(1);

  std::string config_path, out, solution;
  int N = 0, points = 0;
  double tmax = 0.0;

  auto* solve = app.add_subcommand("solve", "find and verify solutions at the configured lambda");
  solve->add_option("--config", config_path)->required();
  solve->add_option("--out", out, "output directory (default: config 'output' or .)");

  auto* sweep = app.add_subcommand("sweep", "count solutions over the configured lambda grid");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out)->required();

  auto* verify = app.add_subcommand("verify", "re-check a solution CSV");
  verify->add_option("--config", config_path)->required();
  verify->add_option("--solution", solution)->required();

  auto* gamma = app.add_subcommand("gamma", "print Gamma(N)");
  gamma->add_option("--N", N)->required();

  auto* classify = app.add_subcommand("classify", "limit classes, regimes and lambda0 thresholds");
  classify->add_option("--config", config_path)->required();

  auto* envelope = app.add_subcommand("envelope", "sampled envelope fhat on [0, tmax]");
  envelope->add_option("--config", config_path)->required();
  envelope->add_option("--tmax", tmax)->required();
  envelope->add_option("--points", points)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? radma::exit_ok : radma::exit_validation;
  }

  if (gamma->parsed()) return radma::run_gamma(N, std::cout, std::cerr);

  radma::Config cfg;
  try {
    cfg = radma::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return radma::exit_validation;
  }
  try {
    if (solve->parsed()) {
      if (out.empty()) out = cfg.output.empty() ? "." : cfg.output;
      return radma::run_solve(cfg, out, std::cout, std::cerr);
    }
    if (sweep->parsed()) return radma::run_sweep(cfg, out, std::cout, std::cerr);
    if (verify->parsed()) return radma::run_verify(cfg, solution, std::cout, std::cerr);
    if (classify->parsed()) return radma::run_classify(cfg, std::cout, std::cerr);
    if (envelope->parsed()) return radma::run_envelope(cfg, tmax, points, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return radma::exit_solver;
  }
  return radma::exit_validation;
}
