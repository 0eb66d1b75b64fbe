// subdiff <kind> [--config FILE] [--seed N] [--paths N] [--out DIR] [--workers N]

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "subdiff/harness/experiments.hpp"
#include "subdiff/parallel.hpp"

using namespace subdiff::harness;

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo versus fractional PDE cross-checks for time-changed processes"};
  std::string kind_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::string out_dir;
  unsigned workers = subdiff::default_worker_count(1);
  bool print_config = false;

  std::string kinds;
  for (auto k : all_kinds()) kinds += (kinds.empty() ? "" : " | ") + std::string(to_string(k));
  app.add_option("kind", kind_name, kinds)->required();
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--paths", paths, "number of Monte Carlo paths (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--workers", workers, "worker threads (default: $SUBDIFF_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  ExperimentConfig config;
  try {
    const ExperimentKind kind = parse_kind(kind_name);
    config = config_path.empty() ? default_config(kind) : load_config(config_path, kind);
    if (seed) config.seed = *seed;
    if (paths) config.n_paths = *paths;
    if (!out_dir.empty()) config.output_dir = out_dir;
    validate(config);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  if (print_config) {
    std::cout << serialize_config(config);
    return kExitPass;
  }

  try {
    RunOptions options;
    options.workers = workers;
    const auto report = run_experiment(config, options);
    std::cout << report_text(report);
    return report.passed() ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
