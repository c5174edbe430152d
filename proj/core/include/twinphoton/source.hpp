#pragma once

// Physical model of the counterpropagating source: phase-matching tuning
// curves, the pump-overlap coherence beta and the resulting two-photon state.
//
// Interaction 1: pump at +theta, H-polarised signal (right facet), V idler.
// Interaction 2: pump at -theta, V-polarised signal, H idler.

#include <optional>
#include <vector>

#include "twinphoton/dispersion.hpp"
#include "twinphoton/qstate.hpp"

namespace twinphoton {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

enum class Interaction { first, second };

struct WavelengthPair {
  double signal_nm = 0.0;
  double idler_nm = 0.0;
};

struct TuningPoint {
  double theta_deg = 0.0;
  std::optional<WavelengthPair> interaction1;  // empty: no root in window
  std::optional<WavelengthPair> interaction2;
};

/// Pump incidence angle (degrees) at which both photons of either
/// interaction share the frequency omega_p / 2.
double degeneracy_angle(const DispersionModel& disp, double lambda_p_nm);

/// Normalised phase-matching residual
/// [nu_s n_s(nu_s) - nu_i n_i(nu_i) -/+ nu_p sin(theta)] / nu_p at the given
/// signal wavelength, with nu = 1/lambda and energy conservation imposed.
double phase_mismatch(const DispersionModel& disp, double lambda_p_nm, double theta_deg,
                      Interaction which, double signal_nm);

/// Bracketed bisection over the dispersion window. Returns nullopt when no
/// sign change is found.
std::optional<WavelengthPair> solve_phase_matching(const DispersionModel& disp, double lambda_p_nm,
                                                   double theta_deg, Interaction which);

/// n evenly spaced angles over [theta_min, theta_max]; n == 1 gives theta_min.
std::vector<TuningPoint> tuning_curves(const DispersionModel& disp, double lambda_p_nm,
                                       double theta_min_deg, double theta_max_deg, int n_points);

/// Wavelength mismatch (nm) between the right-exiting photons of the two
/// interactions when pumped simultaneously at +theta and -theta.
/// Throws SolverFailure if either interaction has no solution.
double spectral_detuning(const DispersionModel& disp, double lambda_p_nm, double theta_deg);

struct PumpGeometry {
  double lambda_p_nm = 759.0;
  double theta_deg = 0.35;
  double waist_mm = 2.4;        // at the biprism
  double delta_z_mm = 0.0;      // misalignment away from the best-overlap crossing
  double length_mm = 1.8;       // illuminated waveguide length
  double filter_fwhm_nm = 1.2;  // intensity FWHM of the spectral filter

  void validate() const;

  /// Beam radius projected on the waveguide axis, w_p / cos(theta).
  double projected_waist_mm() const;

  /// Distance between the sharp-edged intensity maxima of the two half beams.
  double peak_separation_mm() const;
};

/// Separation, in units of the beam radius, at which two mirror-image
/// half-Gaussians overlap best: root of x erf(x / sqrt2) = sqrt(2/pi) exp(-x^2/2).
/// Their normalised overlap there is 0.8435.
inline constexpr double kBestCrossing = 0.8769009855524005;

enum class PumpBeam { first = 1, second = 2 };

struct PumpProfile {
  std::vector<double> z_mm;
  std::vector<double> amplitude;
  double peak_z_mm = 0.0;
  double l2_norm = 0.0;  // trapezoidal sqrt(int |f|^2 dz), mm^(1/2)
};

/// Half-Gaussian amplitude of one biprism half on the waveguide axis, sampled
/// on [-L/2, L/2]. Beam 1 keeps z <= peak, beam 2 is its mirror image.
PumpProfile pump_profile(const PumpGeometry& geom, PumpBeam beam, int n_samples);

/// Same profile sampled on an arbitrary window.
PumpProfile pump_profile(const PumpGeometry& geom, PumpBeam beam, int n_samples, double z_min_mm,
                         double z_max_mm);

struct OverlapOptions {
  /// Frequency-to-wavevector map (s/m). Defaults to (n_H + n_V)/c at 2 lambda_p.
  std::optional<double> kappa_s_per_m;
};

/// Coherence beta of the source state from the filtered joint-spectral overlap of the
/// two interactions. |beta| <= 1/2.
cplx overlap_beta(const PumpGeometry& geom, const DispersionModel& disp,
                  const OverlapOptions& options = {});

/// Model state with alpha1 = alpha2 = 1/2 and beta from overlap_beta.
DensityMatrix source_state(const PumpGeometry& geom, const DispersionModel& disp,
                           const OverlapOptions& options = {});

}  // namespace twinphoton
