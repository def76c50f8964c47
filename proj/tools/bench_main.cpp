#include <iostream>

#include <CLI11.hpp>

#include "cpm/bench.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Projection-free contracting-point solvers over the simplex"};
  app.require_subcommand(1);

  cpm::bench::ExperimentConfig cfg;
  std::vector<std::string> methods;

  auto* run = app.add_subcommand("run", "run one experiment and write per-method traces");
  run->add_option("--n", cfg.n, "problem dimension");
  run->add_option("--m", cfg.m, "number of linear terms");
  run->add_option("--mu", cfg.mu, "smoothing parameter");
  run->add_option("--seed", cfg.seed, "instance seed");
  run->add_option("--method", methods, "fw or icn (repeatable)");
  run->add_option("--c", cfg.c, "inner accuracy constant for icn");
  run->add_option("--max-outer", cfg.max_outer, "outer iteration budget");
  run->add_option("--inner-cap", cfg.inner_cap, "inner iteration cap (0: automatic)");
  run->add_option("--certificate", cfg.certificate, "record accuracy certificates");
  run->add_option("--out", cfg.out, "output path prefix");
  run->add_option("--format", cfg.format, "csv or json");
  run->add_flag("--no-walltime", [&](int64_t) { cfg.record_wall_time = false; },
                "zero the wall_ms column for byte-stable output");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "run a JSON array of configs in parallel");
  sweep->add_option("--config", sweep_path, "JSON config file")->required();

  auto* smooth = app.add_subcommand("smoothness", "print a smoothness-constants report");
  smooth->add_option("--n", cfg.n, "problem dimension");
  smooth->add_option("--m", cfg.m, "number of linear terms");
  smooth->add_option("--mu", cfg.mu, "smoothing parameter");
  smooth->add_option("--seed", cfg.seed, "instance seed");

  long budget = 100000;
  auto* ref = app.add_subcommand("reference", "bracket F* with long certified runs");
  ref->add_option("--n", cfg.n, "problem dimension");
  ref->add_option("--m", cfg.m, "number of linear terms");
  ref->add_option("--mu", cfg.mu, "smoothing parameter");
  ref->add_option("--seed", cfg.seed, "instance seed");
  ref->add_option("--budget", budget, "FW iteration budget (>= 1e4)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!methods.empty()) cfg.methods = methods;
      return cpm::bench::run_experiment(cfg);
    }
    if (sweep->parsed()) {
      return cpm::bench::run_sweep(cpm::bench::parse_sweep_file(sweep_path));
    }
    if (smooth->parsed()) {
      const auto inst = cpm::bench::generate_instance(cfg.n, cfg.m, cfg.mu, cfg.seed);
      std::cout << cpm::bench::smoothness_report(inst) << std::endl;
      return 0;
    }
    if (ref->parsed()) {
      const auto inst = cpm::bench::generate_instance(cfg.n, cfg.m, cfg.mu, cfg.seed);
      auto problem = cpm::bench::make_softmax_problem(inst);
      const auto bracket = cpm::bench::reference_solution(*problem, budget);
      std::cout << "{\"F_star_upper\": " << bracket.upper
                << ", \"F_star_lower\": " << bracket.lower << "}" << std::endl;
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
