#include "pit/bench/config.hpp"
#include "pit/bench/experiment.hpp"

#include <pit/errors.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char** argv) {
  using namespace pit::bench;

  CLI::App app{"Periodic steady-state solver with unknown period"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Run one experiment from a config file");
  std::string config_path;
  std::string mode;
  std::size_t windows = 0;
  double fine_dtau = 0.0;
  double coarse_dtau = 0.0;
  double tol = 0.0;
  std::string out;
  std::size_t workers = 0;
  solve->add_option("--config", config_path, "Config file")->required();
  solve->add_option("--mode", mode, "sequential | shooting | pppc | pppc-up");
  solve->add_option("--windows", windows, "Number of windows N");
  solve->add_option("--fine-dtau", fine_dtau, "Fine step in rescaled time");
  solve->add_option("--coarse-dtau", coarse_dtau, "Window length in rescaled time");
  solve->add_option("--tol", tol, "Outer tolerance");
  solve->add_option("--out", out, "Output directory");
  solve->add_option("--workers", workers, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    RunConfig c = load_config(config_path);
    if (!mode.empty()) c.mode = parse_mode(mode);
    if (solve->count("--windows")) c.windows = windows;
    if (solve->count("--fine-dtau")) c.fine_dtau = fine_dtau;
    if (solve->count("--coarse-dtau")) c.coarse_dtau = coarse_dtau;
    if (solve->count("--tol")) c.outer_tol = tol;
    if (solve->count("--out")) c.out_dir = out;
    if (solve->count("--workers")) c.workers = workers;

    const ExperimentSummary s = run_experiment(c);
    std::cout << format_summary(s);
    if (!s.error.empty()) std::cerr << "error: " << s.error << '\n';
    return s.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const pit::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  }
}
