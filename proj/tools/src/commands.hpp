#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "twinphoton/counting.hpp"
#include "twinphoton/qstate.hpp"

namespace twinphoton::cli {

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Source state from the overlap model, or the model state with the
/// configured beta when one is set.
DensityMatrix configured_source_state(const ExperimentConfig& config);

/// The 16 simulated tomography records for the configured source and seed.
std::vector<CountRecord> simulate_records(const ExperimentConfig& config);

/// Each command writes its files into config.output_dir and a short report
/// to `log`. Errors propagate as ValidationError / IoError / SolverFailure.
void cmd_tuning_curves(const ExperimentConfig& config, std::ostream& log);
void cmd_simulate(const ExperimentConfig& config, std::ostream& log);
void cmd_reconstruct(const ExperimentConfig& config, const std::filesystem::path& counts_csv, std::ostream& log);
void cmd_sweep_overlap(const ExperimentConfig& config, std::ostream& log);

}  // namespace twinphoton::cli
