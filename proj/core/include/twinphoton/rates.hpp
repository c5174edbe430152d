#pragma once

namespace twinphoton {

/// Per-pulse pair generation and detection budget. Both arms share the same
/// efficiencies and per-gate noise probabilities.
struct RateBudget {
  double pairs_per_pulse = 0.007;
  double rep_rate_hz = 1e5;
  double eta_det = 0.25;
  double eta_coll = 0.13;
  double dark_prob_per_gate = 1.8e-4;
  // Luminescence plus uncorrelated signal, fitted so that the accidental rate is 0.04 Hz.
  double stray_prob_per_gate = 4.5e-4;

  void validate() const;
};

struct CoincidenceRates {
  double true_hz = 0.0;
  double accidental_hz = 0.0;
};

CoincidenceRates expected_rates(const RateBudget& budget);

/// Weight p of the pair state in the observed mixture p rho + (1 - p) I/4.
double noise_fraction(double true_hz, double accidental_hz);
inline double noise_fraction(const CoincidenceRates& r) { return noise_fraction(r.true_hz, r.accidental_hz); }

}  // namespace twinphoton
