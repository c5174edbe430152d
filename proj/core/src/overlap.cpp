#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twinphoton/errors.hpp"
#include "twinphoton/source.hpp"

namespace twinphoton {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFootprintRadii = 5.0;  // exp(-25) amplitude beyond this

double deg2rad(double d) { return d * kPi / 180.0; }

double half_gaussian(double z, double peak, double w, PumpBeam beam) {
  const bool inside = beam == PumpBeam::first ? z <= peak : z >= peak;
  if (!inside) return 0.0;
  const double u = (z - peak) / w;
  return std::exp(-u * u);
}

double signed_peak(const PumpGeometry& g, PumpBeam beam) {
  const double half = 0.5 * g.peak_separation_mm();
  return beam == PumpBeam::first ? half : -half;
}

// Amplitude samples of one beam on its own support, trapezoid weights folded in.
struct BeamSamples {
  double z0 = 0.0;  // m
  double h = 0.0;
  std::vector<double> weighted;
};

// Filtered spectral overlap int T^2(W) phi_a*(W) phi_b(W) dW with
// phi_k(W) = int f_k(z) exp(i kappa (W - W_k) z) dz. The Gaussian filter turns
// the frequency integral into a Gaussian kernel in z - z', so the result is a
// banded double sum over the two beams (up to the constant sqrt(pi/a)).
cplx filtered_overlap(const BeamSamples& a, double omega_a, const BeamSamples& b, double omega_b,
                      double kappa, double a_filter) {
  const double kernel_sigma = std::sqrt(2.0 * a_filter) / kappa;
  const double cutoff = 7.0 * kernel_sigma;
  const double h = a.h;
  const double c = a.z0 - b.z0;  // z_i - z'_m = (i - m) h + c
  const auto n_a = static_cast<long>(a.weighted.size());
  const auto n_b = static_cast<long>(b.weighted.size());
  const long d_lo = static_cast<long>(std::ceil((-cutoff - c) / h));
  const long d_hi = static_cast<long>(std::floor((cutoff - c) / h));
  if (d_hi < d_lo) return {0.0, 0.0};

  std::vector<double> kernel(d_hi - d_lo + 1);
  for (long d = d_lo; d <= d_hi; ++d) {
    const double u = (d * h + c) / kernel_sigma;
    kernel[d - d_lo] = std::exp(-0.5 * u * u);
  }
  std::vector<cplx> pa(n_a), pb(n_b);
  for (long i = 0; i < n_a; ++i) pa[i] = a.weighted[i] * std::polar(1.0, kappa * omega_a * (a.z0 + i * h));
  for (long m = 0; m < n_b; ++m) pb[m] = b.weighted[m] * std::polar(1.0, -kappa * omega_b * (b.z0 + m * h));

  cplx total{0.0, 0.0};
  for (long i = 0; i < n_a; ++i) {
    if (pa[i] == 0.0) continue;
    const long m_lo = std::max(0L, i - d_hi);
    const long m_hi = std::min(n_b - 1, i - d_lo);
    cplx row{0.0, 0.0};
    for (long m = m_lo; m <= m_hi; ++m) row += kernel[i - m - d_lo] * pb[m];
    total += pa[i] * row;
  }
  return total * h * h;
}

}  // namespace

void PumpGeometry::validate() const {
  if (!(lambda_p_nm > 0.0 && std::isfinite(lambda_p_nm)))
    throw ValidationError("pump wavelength must be positive");
  if (!(std::abs(theta_deg) < 90.0)) throw ValidationError("|theta| must be below 90 degrees");
  if (!(waist_mm > 0.0 && std::isfinite(waist_mm)))
    throw ValidationError("pump waist must be positive");
  if (!(length_mm > 0.0 && std::isfinite(length_mm)))
    throw ValidationError("waveguide length must be positive");
  if (!(filter_fwhm_nm > 0.0 && std::isfinite(filter_fwhm_nm)))
    throw ValidationError("filter FWHM must be positive");
  if (!std::isfinite(delta_z_mm)) throw ValidationError("delta_z must be finite");
}

double PumpGeometry::projected_waist_mm() const { return waist_mm / std::cos(deg2rad(theta_deg)); }

double PumpGeometry::peak_separation_mm() const {
  return kBestCrossing * projected_waist_mm() + std::abs(delta_z_mm);
}

PumpProfile pump_profile(const PumpGeometry& geom, PumpBeam beam, int n_samples) {
  return pump_profile(geom, beam, n_samples, -0.5 * geom.length_mm, 0.5 * geom.length_mm);
}

PumpProfile pump_profile(const PumpGeometry& geom, PumpBeam beam, int n_samples, double z_min_mm,
                         double z_max_mm) {
  geom.validate();
  if (n_samples < 64) throw ValidationError("pump profile needs at least 64 samples");
  if (!(z_max_mm > z_min_mm)) throw ValidationError("profile window is empty");
  PumpProfile p;
  p.peak_z_mm = signed_peak(geom, beam);
  const double w = geom.projected_waist_mm();
  const double h = (z_max_mm - z_min_mm) / (n_samples - 1);
  p.z_mm.resize(n_samples);
  p.amplitude.resize(n_samples);
  double norm2 = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    // Fill from both ends so a symmetric window samples exact mirror points.
    const double z = 2 * i < n_samples ? z_min_mm + h * i : z_max_mm - h * (n_samples - 1 - i);
    p.z_mm[i] = z;
    p.amplitude[i] = half_gaussian(z, p.peak_z_mm, w, beam);
    const double wt = (i == 0 || i + 1 == n_samples) ? 0.5 : 1.0;
    norm2 += wt * p.amplitude[i] * p.amplitude[i] * h;
  }
  p.l2_norm = std::sqrt(norm2);
  return p;
}

cplx overlap_beta(const PumpGeometry& geom, const DispersionModel& disp,
                  const OverlapOptions& options) {
  geom.validate();
  const double lambda_c_nm = 2.0 * geom.lambda_p_nm;
  const double kappa = options.kappa_s_per_m.value_or(
      (disp.n_h(lambda_c_nm) + disp.n_v(lambda_c_nm)) / kSpeedOfLight);
  if (!(kappa > 0.0 && std::isfinite(kappa))) throw ValidationError("kappa must be positive");

  // Central signal detunings (rad/s) of the two interactions, pumped at +theta and -theta.
  const auto one = solve_phase_matching(disp, geom.lambda_p_nm, geom.theta_deg, Interaction::first);
  const auto two =
      solve_phase_matching(disp, geom.lambda_p_nm, -geom.theta_deg, Interaction::second);
  if (!one || !two)
    throw SolverFailure("no phase-matching solution at theta = " + std::to_string(geom.theta_deg));
  auto detuning = [&](double signal_nm) {
    return 2.0 * kPi * kSpeedOfLight * 1e9 * (1.0 / signal_nm - 1.0 / lambda_c_nm);
  };
  const double omega1 = detuning(one->signal_nm);
  const double omega2 = detuning(two->signal_nm);

  // Filter: intensity transmission exp(-a W^2), a = 4 ln2 / F^2 with F the FWHM in rad/s.
  const double fwhm = 2.0 * kPi * kSpeedOfLight * (geom.filter_fwhm_nm * 1e-9) /
                      std::pow(lambda_c_nm * 1e-9, 2);
  const double a_filter = 4.0 * std::log(2.0) / (fwhm * fwhm);

  // Each beam sampled over its footprint with the sharp edge at a grid end.
  const double w = geom.projected_waist_mm() * 1e-3;
  const double peak = 0.5 * geom.peak_separation_mm() * 1e-3;
  const double support = kFootprintRadii * w;
  const double kernel_sigma = std::sqrt(2.0 * a_filter) / kappa;
  const double omega_max = std::max({std::abs(omega1), std::abs(omega2), 1.0});
  const double dz = std::min({w / 64.0, kernel_sigma / 8.0, 2.0 * kPi / (kappa * omega_max) / 16.0});
  const int nz = static_cast<int>(std::ceil(support / dz)) + 1;
  BeamSamples b1, b2;
  b1.z0 = peak - support;  // beam 1: [peak - support, peak]
  b2.z0 = -peak;           // beam 2: [-peak, -peak + support]
  b1.h = b2.h = support / (nz - 1);
  b1.weighted.resize(nz);
  b2.weighted.resize(nz);
  for (int j = 0; j < nz; ++j) {
    const double wt = (j == 0 || j + 1 == nz) ? 0.5 : 1.0;
    const double u1 = (b1.z0 + j * b1.h - peak) / w;
    const double u2 = (b2.z0 + j * b2.h + peak) / w;
    b1.weighted[j] = wt * std::exp(-u1 * u1);
    b2.weighted[j] = wt * std::exp(-u2 * u2);
  }

  const cplx i12 = filtered_overlap(b1, omega1, b2, omega2, kappa, a_filter);
  const double i11 = filtered_overlap(b1, omega1, b1, omega1, kappa, a_filter).real();
  const double i22 = filtered_overlap(b2, omega2, b2, omega2, kappa, a_filter).real();
  if (!(i11 > 0.0 && i22 > 0.0)) return {0.0, 0.0};
  cplx beta = 0.5 * i12 / std::sqrt(i11 * i22);
  if (std::abs(beta) > 0.5) beta *= 0.5 / std::abs(beta);
  return beta;
}

DensityMatrix source_state(const PumpGeometry& geom, const DispersionModel& disp,
                           const OverlapOptions& options) {
  return model_density_matrix({0.5, 0.5, overlap_beta(geom, disp, options)});
}

}  // namespace twinphoton
