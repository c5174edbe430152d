#pragma once

// Simulation of the coincidence-counting tomography experiment.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twinphoton/qstate.hpp"
#include "twinphoton/rates.hpp"

namespace twinphoton {

/// Single-photon analyser state for a label in {H, V, D, A, R, L}:
/// H=(1,0), V=(0,1), D=(H+V)/sqrt2, A=(H-V)/sqrt2, R=(H-iV)/sqrt2, L=(H+iV)/sqrt2.
Ket2 analyzer_state(char label);

struct MeasurementSetting {
  std::string label;  // signal letter then idler letter, e.g. "HV"
  Ket2 signal;
  Ket2 idler;

  /// Throws ValidationError on malformed labels.
  static MeasurementSetting from_label(std::string_view label);

  Ket4 ket() const;
};

/// The 16 James-Kwiat settings, in their canonical order.
std::vector<MeasurementSetting> projector_set_16();

/// <psi_s psi_i| rho |psi_s psi_i>.
double coincidence_probability(const DensityMatrix& rho, const MeasurementSetting& setting);

struct CountRecord {
  MeasurementSetting setting;
  double coincidences = 0.0;         // integral for raw data, may be fractional after subtraction
  double duration_s = 0.0;
  double accidental_estimate = 0.0;  // expected accidental coincidences in this record
};

/// Poisson coincidence counts per setting. The mean is
/// duration * (true_hz * P(rho_pair, s) + accidental_hz / 4): accidentals are
/// polarisation independent. Each setting draws from its own stream derived
/// from (seed, label).
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho_pair,
                                         std::span<const MeasurementSetting> settings,
                                         const CoincidenceRates& rates, double duration_s,
                                         std::uint64_t seed);

/// Expected counts (no sampling), used as the infinite-statistics limit.
std::vector<CountRecord> expected_counts(const DensityMatrix& rho_pair,
                                         std::span<const MeasurementSetting> settings,
                                         const CoincidenceRates& rates, double duration_s);

struct HistogramOptions {
  double window_ns = 80.0;
  double bin_ns = 0.5;
  double jitter_sigma_ns = 0.25;

  void validate() const;
};

struct Histogram {
  std::string label;
  std::vector<double> bin_edges_ns;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
};

/// Start-stop delay histogram for one setting. Bins are centred so that zero
/// delay is the middle of a bin. True coincidences are Gaussian-jittered
/// around zero delay; accidentals are flat with accidental_hz / 4 expected
/// per bin-width window.
Histogram simulate_histogram(const MeasurementSetting& setting, const DensityMatrix& rho_pair,
                             const CoincidenceRates& rates, double duration_s,
                             const HistogramOptions& options, std::uint64_t seed);

}  // namespace twinphoton
