#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "twinphoton/errors.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace twinphoton;

  CLI::App app{"Simulation and tomography toolkit for a degenerate counter-propagating photon-pair source"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "INI config, or a JSON config echo")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override [run] seed");
  app.add_option("--out", out_dir, "Override [run] output_dir");

  std::optional<double> theta_min, theta_max;
  std::optional<int> points;
  auto* tuning = app.add_subcommand("tuning-curves", "Signal/idler wavelengths versus pump angle");
  tuning->add_option("--theta-min", theta_min, "Lower pump angle (deg)");
  tuning->add_option("--theta-max", theta_max, "Upper pump angle (deg)");
  tuning->add_option("--points", points, "Number of angles");

  auto* simulate = app.add_subcommand("simulate", "Simulated tomography counts and HH/HV histograms");

  std::string counts_path;
  auto* recon = app.add_subcommand("reconstruct", "Maximum-likelihood tomography of a counts CSV");
  recon->add_option("counts", counts_path, "Counts CSV")->required();

  auto* sweep = app.add_subcommand("sweep-overlap", "Net concurrence over pump angle and misalignment");

  for (auto* sub : {tuning, simulate, recon, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    cli::ExperimentConfig config;
    if (config_path.empty())
      config.resolve();
    else
      config = cli::load_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (theta_min) config.tuning.theta_min_deg = *theta_min;
    if (theta_max) config.tuning.theta_max_deg = *theta_max;
    if (points) config.tuning.points = *points;
    config.resolve();

    if (tuning->parsed())
      cli::cmd_tuning_curves(config, std::cout);
    else if (simulate->parsed())
      cli::cmd_simulate(config, std::cout);
    else if (recon->parsed())
      cli::cmd_reconstruct(config, counts_path, std::cout);
    else if (sweep->parsed())
      cli::cmd_sweep_overlap(config, std::cout);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
