// Batch experiment runner for the polling-system lab.
//
//   polling_lab --config configs/table1.json [--seed N] [--reps N]
//               [--out file.csv] [--format csv|pretty]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical error,
// 3 unstable system.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

#include "polling/config.hpp"
#include "polling/errors.hpp"
#include "polling/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"polling-system laboratory"};
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  int reps = 0;
  app.add_option("--config", config_path, "experiment configuration file (JSON)")
      ->required();
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--reps", reps, "override the replication count");
  app.add_option("--out", out_path, "output file (default: per config, else stdout)");
  app.add_option("--format", format, "csv or pretty (default: per config)");
  CLI11_PARSE(app, argc, argv);

  try {
    polling::ConfigFile cfg = polling::ConfigFile::load(config_path);
    polling::ExperimentConfig& exp = cfg.experiment();
    if (seed != 0) exp.sim.master_seed = seed;
    if (reps != 0) exp.sim.replications = reps;
    if (!out_path.empty()) exp.output_path = out_path;
    if (!format.empty()) {
      if (format != "csv" && format != "pretty")
        throw polling::SpecError("format must be csv or pretty");
      exp.format = format;
    }

    const polling::ExperimentResult result = polling::run_experiment(exp, cfg.raw());
    if (exp.output_path.empty()) {
      polling::write_result(result, exp, std::cout);
    } else {
      std::ofstream out(exp.output_path);
      if (!out) throw polling::SpecError("cannot open output file: " + exp.output_path);
      polling::write_result(result, exp, out);
      std::cerr << "wrote " << exp.output_path << "\n";
    }
    return 0;
  } catch (const polling::StabilityError& e) {
    std::cerr << "instability: " << e.what() << "\n";
    return 3;
  } catch (const polling::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}
