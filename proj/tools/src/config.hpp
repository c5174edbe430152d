#pragma once

// Experiment configuration: one INI file with a section per module. The JSON
// echo written next to results loads back through the same key table.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinphoton/counting.hpp"
#include "twinphoton/dispersion.hpp"
#include "twinphoton/rates.hpp"
#include "twinphoton/source.hpp"
#include "twinphoton/tomography.hpp"

namespace twinphoton::cli {

struct DispersionConfig {
  double reference_nm = 1518.0;
  std::vector<double> n_h{3.0622, -1e-4};
  std::vector<double> n_v{3.0500, -1e-4};
  double min_nm = 1400.0;
  double max_nm = 1650.0;

  DispersionModel model() const { return {reference_nm, n_h, n_v, min_nm, max_nm}; }
};

struct TuningConfig {
  double theta_min_deg = -0.7;
  double theta_max_deg = 0.7;
  int points = 281;
};

// Grid centred on the pump angle.
struct SweepConfig {
  double theta_halfwidth_deg = 0.1;
  int theta_points = 21;
  double delta_z_max_over_wp = 2.0;
  int delta_z_points = 21;
};

struct ExperimentConfig {
  DispersionConfig dispersion;
  PumpGeometry pump;
  bool theta_auto = true;  // pump angle follows the degeneracy angle
  std::optional<double> kappa_s_per_m;
  std::optional<double> beta;  // replaces the overlap model when set
  RateBudget rates;
  double duration_s = 600.0;
  HistogramOptions histogram;
  MleOptions mle;
  int mc_samples = 200;
  TuningConfig tuning;
  SweepConfig sweep;
  std::uint64_t seed = 1;
  std::string output_dir = ".";

  /// Checks every module invariant and fills in the automatic pump angle.
  void resolve();

  OverlapOptions overlap_options() const;
  TomographyOptions tomography_options() const;

  /// Fully resolved configuration, loadable by load_config.
  nlohmann::json to_json() const;
};

/// Reads an INI file, or the JSON echo when the extension is .json. Missing
/// or unreadable files throw IoError; bad content throws ValidationError.
ExperimentConfig load_config(const std::filesystem::path& path);

ExperimentConfig parse_ini(std::istream& in, std::string_view source = "<config>");
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace twinphoton::cli
