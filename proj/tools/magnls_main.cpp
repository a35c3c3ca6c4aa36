// Command-line laboratory: magnls <experiment> --config <path> [--out <dir>] [--jobs N] [--seed S]
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "magnls/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for the strong magnetic field NLS and its averaged limit"};
  std::string experiment;
  std::string config_path;
  std::string out_dir = "magnls_out";
  int jobs = 1;
  long long seed = -1;
  app.add_option("experiment", experiment, "selftest | conservation | converge | scaling | scatter")
      ->required()
      ->check(CLI::IsMember(magnls::experiment_names()));
  app.add_option("--config", config_path, "key=value run configuration")->required();
  app.add_option("--out", out_dir, "output directory (MAGNLS_OUT overrides)");
  app.add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for random initial data (overrides the config)")
      ->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("MAGNLS_OUT"); env && *env) out_dir = env;

  try {
    const magnls::LabConfig cfg = magnls::load_config(config_path);
    magnls::ExperimentOptions opt;
    opt.out_dir = out_dir;
    opt.jobs = jobs;
    if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
    if (cfg.sim.stiff_warning()) {
      std::cerr << "warning: dt > eps^2/10, outside the accurate splitting regime\n";
    }
    const magnls::RunManifest m = magnls::run_experiment(experiment, cfg, opt);
    for (const auto& v : m.verdicts) {
      std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": "
                << magnls::format_number(v.measured) << " (" << v.tolerance << ")";
      if (!v.detail.empty()) std::cout << " " << v.detail;
      std::cout << '\n';
    }
    std::cout << "outputs in " << out_dir << '\n';
    return m.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
