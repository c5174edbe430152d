#include "twinphoton/rates.hpp"

#include <cmath>

#include "twinphoton/errors.hpp"

namespace twinphoton {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void RateBudget::validate() const {
  if (!(pairs_per_pulse >= 0.0 && std::isfinite(pairs_per_pulse)))
    throw ValidationError("pairs_per_pulse must be a finite non-negative number");
  if (!(rep_rate_hz >= 0.0 && std::isfinite(rep_rate_hz)))
    throw ValidationError("rep_rate_hz must be a finite non-negative number");
  if (!is_probability(eta_det) || !is_probability(eta_coll))
    throw ValidationError("efficiencies must lie in [0, 1]");
  if (!is_probability(dark_prob_per_gate) || !is_probability(stray_prob_per_gate) ||
      !is_probability(dark_prob_per_gate + stray_prob_per_gate))
    throw ValidationError("per-gate noise probabilities must lie in [0, 1]");
}

CoincidenceRates expected_rates(const RateBudget& b) {
  b.validate();
  const double eta = b.eta_det * b.eta_coll;
  const double g = b.dark_prob_per_gate + b.stray_prob_per_gate;
  return {b.pairs_per_pulse * b.rep_rate_hz * eta * eta, b.rep_rate_hz * g * g};
}

double noise_fraction(double true_hz, double accidental_hz) {
  if (!(true_hz >= 0.0 && accidental_hz >= 0.0))
    throw ValidationError("coincidence rates must be non-negative");
  if (true_hz + accidental_hz == 0.0)
    throw ValidationError("noise fraction undefined when both rates are zero");
  return true_hz / (true_hz + accidental_hz);
}

}  // namespace twinphoton
