#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twinphoton/errors.hpp"
#include "twinphoton/source.hpp"

namespace twinphoton {
namespace {

constexpr int kBracketSegments = 200;
constexpr double kRelativeTolerance = 1e-12;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct Modes {
  Polarization signal;
  Polarization idler;
};

Modes modes_of(Interaction which) {
  return which == Interaction::first ? Modes{Polarization::H, Polarization::V}
                                     : Modes{Polarization::V, Polarization::H};
}

// Residual as a function of signal wavenumber nu_s (1/nm).
double mismatch_nu(const DispersionModel& disp, double nu_p, double sin_theta, Modes m, double nu_s) {
  const double nu_i = nu_p - nu_s;
  return (nu_s * disp.index(m.signal, 1.0 / nu_s) - nu_i * disp.index(m.idler, 1.0 / nu_i) -
          nu_p * sin_theta) /
         nu_p;
}

}  // namespace

double degeneracy_angle(const DispersionModel& disp, double lambda_p_nm) {
  if (!(lambda_p_nm > 0.0)) throw ValidationError("pump wavelength must be positive");
  const double lam = 2.0 * lambda_p_nm;
  if (!disp.contains(lam))
    throw InvalidDispersion("degenerate wavelength " + std::to_string(lam) +
                            " nm outside dispersion window");
  const double s = 0.5 * (disp.n_h(lam) - disp.n_v(lam));
  if (s < -1.0 || s > 1.0) throw InvalidDispersion("birefringence too large for a real angle");
  return std::asin(s) * 180.0 / std::numbers::pi;
}

double phase_mismatch(const DispersionModel& disp, double lambda_p_nm, double theta_deg,
                      Interaction which, double signal_nm) {
  return mismatch_nu(disp, 1.0 / lambda_p_nm, std::sin(deg2rad(theta_deg)), modes_of(which),
                     1.0 / signal_nm);
}

std::optional<WavelengthPair> solve_phase_matching(const DispersionModel& disp, double lambda_p_nm,
                                                   double theta_deg, Interaction which) {
  const double nu_p = 1.0 / lambda_p_nm;
  // Pulled in by a few ulps so that 1/nu never rounds outside the window.
  const double lo = std::max(1.0 / disp.max_nm(), nu_p - 1.0 / disp.min_nm()) * (1.0 + 1e-14);
  const double hi = std::min(1.0 / disp.min_nm(), nu_p - 1.0 / disp.max_nm()) * (1.0 - 1e-14);
  if (!(hi > lo)) return std::nullopt;

  const double sin_theta = std::sin(deg2rad(theta_deg));
  const Modes m = modes_of(which);
  auto f = [&](double nu) { return mismatch_nu(disp, nu_p, sin_theta, m, nu); };

  // Keep the bracketed root nearest degeneracy.
  std::optional<double> best;
  double x0 = lo;
  double f0 = f(x0);
  for (int k = 1; k <= kBracketSegments; ++k) {
    const double x1 = (k == kBracketSegments) ? hi : lo + (hi - lo) * k / kBracketSegments;
    const double f1 = f(x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      while (b - a > kRelativeTolerance * b) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double root = (f0 == 0.0) ? x0 : 0.5 * (a + b);
      if (!best || std::abs(root - 0.5 * nu_p) < std::abs(*best - 0.5 * nu_p)) best = root;
    }
    x0 = x1;
    f0 = f1;
  }
  if (!best) return std::nullopt;
  return WavelengthPair{1.0 / *best, 1.0 / (nu_p - *best)};
}

std::vector<TuningPoint> tuning_curves(const DispersionModel& disp, double lambda_p_nm,
                                       double theta_min_deg, double theta_max_deg, int n_points) {
  if (n_points < 1) throw ValidationError("tuning curve needs at least one point");
  if (!(theta_max_deg >= theta_min_deg)) throw ValidationError("theta range is reversed");
  if (std::abs(theta_min_deg) >= 90.0 || std::abs(theta_max_deg) >= 90.0)
    throw ValidationError("|theta| must be below 90 degrees");
  std::vector<TuningPoint> out;
  out.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double theta =
        n_points == 1 ? theta_min_deg
                      : theta_min_deg + (theta_max_deg - theta_min_deg) * k / (n_points - 1);
    out.push_back({theta, solve_phase_matching(disp, lambda_p_nm, theta, Interaction::first),
                   solve_phase_matching(disp, lambda_p_nm, theta, Interaction::second)});
  }
  return out;
}

double spectral_detuning(const DispersionModel& disp, double lambda_p_nm, double theta_deg) {
  const auto one = solve_phase_matching(disp, lambda_p_nm, theta_deg, Interaction::first);
  const auto two = solve_phase_matching(disp, lambda_p_nm, -theta_deg, Interaction::second);
  if (!one || !two)
    throw SolverFailure("no phase-matching solution at theta = " + std::to_string(theta_deg) +
                        " deg");
  return std::abs(one->signal_nm - two->signal_nm);
}

}  // namespace twinphoton
