#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twinphoton/errors.hpp"
#include "twinphoton/rates.hpp"
#include "twinphoton/source.hpp"

using namespace twinphoton;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// For n(lambda) = n0 + s (lambda - lambda0) the phase-matching condition is
// linear in nu = 1/lambda: nu n(1/nu) = nu (n0 - s lambda0) + s, so
//   interaction 1: nu_s = nu_p (sin theta + a_V) / (a_H + a_V)
//   interaction 2: nu_s = nu_p (sin theta + a_H) / (a_H + a_V)
// when both slopes agree.
WavelengthPair linear_oracle(double lambda_p, double theta_deg, Interaction which) {
  const double a_h = 3.0622 + 1e-4 * 1518.0, a_v = 3.0500 + 1e-4 * 1518.0;
  const double nu_p = 1.0 / lambda_p, st = std::sin(theta_deg * kPi / 180.0);
  const double nu_s = nu_p * (st + (which == Interaction::first ? a_v : a_h)) / (a_h + a_v);
  return {1.0 / nu_s, 1.0 / (nu_p - nu_s)};
}

// Filtered overlap by direct quadrature in frequency: phi_k on a grid over
// +-6 filter widths, Riemann sums in z, no analytic filter integral.
double two_beta_frequency_domain(const PumpGeometry& g, const DispersionModel& d) {
  const double c = 299792458.0, lc = 2.0 * g.lambda_p_nm;
  const double kappa = (d.n_h(lc) + d.n_v(lc)) / c;
  const auto one = solve_phase_matching(d, g.lambda_p_nm, g.theta_deg, Interaction::first);
  const auto two = solve_phase_matching(d, g.lambda_p_nm, -g.theta_deg, Interaction::second);
  auto detune = [&](double nm) { return 2 * kPi * c * 1e9 * (1 / nm - 1 / lc); };
  const double o1 = detune(one->signal_nm), o2 = detune(two->signal_nm);
  const double fwhm = 2 * kPi * c * g.filter_fwhm_nm * 1e-9 / std::pow(lc * 1e-9, 2);
  const double w = g.waist_mm / std::cos(g.theta_deg * kPi / 180) * 1e-3;
  const double half = 0.5 * (0.8769009855524005 * w + std::abs(g.delta_z_mm) * 1e-3);
  const int nz = 1500;
  const double span = 5 * w, h = span / (nz - 1);
  const double omax = 6 * fwhm;
  const int nw = 6001;
  double i11 = 0, i22 = 0;
  std::complex<double> i12 = 0;
  for (int m = 0; m < nw; ++m) {
    const double om = -omax + 2 * omax * m / (nw - 1);
    const double t2 = std::exp(-4 * std::log(2.0) * om * om / (fwhm * fwhm));
    std::complex<double> p1 = 0, p2 = 0;
    for (int j = 0; j < nz; ++j) {
      const double wt = (j == 0 || j == nz - 1) ? 0.5 : 1.0;
      const double z1 = half - span + j * h, z2 = -half + j * h;
      p1 += wt * std::exp(-std::pow((z1 - half) / w, 2)) * std::polar(1.0, kappa * (om - o1) * z1);
      p2 += wt * std::exp(-std::pow((z2 + half) / w, 2)) * std::polar(1.0, kappa * (om - o2) * z2);
    }
    i11 += t2 * std::norm(p1);
    i22 += t2 * std::norm(p2);
    i12 += t2 * std::conj(p1) * p2;
  }
  return std::abs(i12) / std::sqrt(i11 * i22);
}

PumpGeometry at_degeneracy(double delta_z_over_wp = 0.0) {
  PumpGeometry g;
  g.theta_deg = degeneracy_angle(DispersionModel::paper_default(), g.lambda_p_nm);
  g.delta_z_mm = delta_z_over_wp * g.waist_mm;
  return g;
}

}  // namespace

TEST_CASE("dispersion model validation") {
  const auto d = DispersionModel::paper_default();
  CHECK(d.n_h(1518.0) == Approx(3.0622));
  CHECK(d.n_v(1518.0) == Approx(3.0500));
  CHECK(d.n_h(1528.0) == Approx(3.0612));
  CHECK_THROWS_AS(d.n_h(1300.0), InvalidDispersion);
  CHECK_THROWS_AS(DispersionModel(1518.0, {6.0}, {3.0}, 1400, 1650), ValidationError);
  CHECK_THROWS_AS(DispersionModel(1518.0, {3.0}, {3.0}, 1650, 1400), ValidationError);
}

TEST_CASE("degeneracy angle") {
  CHECK(degeneracy_angle(DispersionModel::paper_default(), 759.0) ==
        Approx(std::asin(0.0122 / 2) * 180 / kPi).epsilon(1e-12));
  CHECK(std::abs(degeneracy_angle(DispersionModel::paper_default(), 759.0) - 0.350) < 0.001);
  CHECK(degeneracy_angle(DispersionModel(1518, {3.05}, {3.05}, 1400, 1650), 759.0) == 0.0);
  CHECK(degeneracy_angle(DispersionModel(1518, {3.07}, {3.05}, 1400, 1650), 759.0) == Approx(0.572967).epsilon(1e-5));
  CHECK_THROWS_AS(degeneracy_angle(DispersionModel(1518, {4.5}, {1.5}, 1400, 1650), 759.0), InvalidDispersion);
  CHECK_THROWS_AS(degeneracy_angle(DispersionModel::paper_default(), 900.0), InvalidDispersion);
}

TEST_CASE("tuning curves against the closed-form linear-dispersion solution") {
  const auto d = DispersionModel::paper_default();
  const auto pts = tuning_curves(d, 759.0, -0.7, 0.7, 141);
  REQUIRE(pts.size() == 141);
  for (const auto& p : pts) {
    REQUIRE(p.interaction1);
    REQUIRE(p.interaction2);
    const auto o1 = linear_oracle(759.0, p.theta_deg, Interaction::first);
    const auto o2 = linear_oracle(759.0, p.theta_deg, Interaction::second);
    CHECK(std::abs(p.interaction1->signal_nm - o1.signal_nm) < 1e-7);
    CHECK(std::abs(p.interaction1->idler_nm - o1.idler_nm) < 1e-7);
    CHECK(std::abs(p.interaction2->signal_nm - o2.signal_nm) < 1e-7);
    CHECK(std::abs(p.interaction2->idler_nm - o2.idler_nm) < 1e-7);
    for (const auto* w : {&*p.interaction1, &*p.interaction2})
      CHECK(std::abs(1.0 / w->signal_nm + 1.0 / w->idler_nm - 1.0 / 759.0) <= 1e-12);
    CHECK(std::abs(phase_mismatch(d, 759.0, p.theta_deg, Interaction::first, p.interaction1->signal_nm)) < 1e-8);
    CHECK(std::abs(phase_mismatch(d, 759.0, p.theta_deg, Interaction::second, p.interaction2->signal_nm)) < 1e-8);
  }
}

TEST_CASE("degenerate point and theta -> -theta symmetry") {
  const auto d = DispersionModel::paper_default();
  const double td = degeneracy_angle(d, 759.0);
  // Interaction 1 is degenerate at +theta_deg, interaction 2 at -theta_deg.
  const auto plus = tuning_curves(d, 759.0, td, td, 1);
  const auto minus = tuning_curves(d, 759.0, -td, -td, 1);
  REQUIRE(plus.size() == 1);
  for (double v : {plus[0].interaction1->signal_nm, plus[0].interaction1->idler_nm,
                   minus[0].interaction2->signal_nm, minus[0].interaction2->idler_nm})
    CHECK(std::abs(v - 1518.0) < 0.01);
  CHECK(std::abs(plus[0].interaction2->signal_nm - 1518.0) > 1.0);

  for (int k = 0; k < 100; ++k) {
    const double theta = -1.0 + 2.0 * k / 99.0;
    const auto two = solve_phase_matching(d, 759.0, theta, Interaction::second);
    const auto one = solve_phase_matching(d, 759.0, -theta, Interaction::first);
    REQUIRE(one);
    REQUIRE(two);
    CHECK(std::abs(two->signal_nm - one->idler_nm) < 1e-6);
    CHECK(std::abs(two->idler_nm - one->signal_nm) < 1e-6);
  }
}

TEST_CASE("solver gaps are reported per point") {
  const auto d = DispersionModel::paper_default();
  const auto pts = tuning_curves(d, 759.0, 0.0, 40.0, 3);
  CHECK(pts[0].interaction1.has_value());
  CHECK_FALSE(pts[2].interaction1.has_value());
  CHECK_THROWS_AS(spectral_detuning(d, 759.0, 40.0), SolverFailure);
  CHECK_THROWS_AS(tuning_curves(d, 759.0, 0.0, 1.0, 0), ValidationError);
}

TEST_CASE("spectral detuning") {
  const auto d = DispersionModel::paper_default();
  const double td = degeneracy_angle(d, 759.0);
  CHECK(spectral_detuning(d, 759.0, td) < 1e-6);
  CHECK(spectral_detuning(d, 759.0, td + 0.002) <= 0.1);
  double prev = -1.0;
  for (int k = 0; k <= 20; ++k) {
    const double v = spectral_detuning(d, 759.0, td + 0.1 * k / 20.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("pump profiles") {
  PumpGeometry g = at_degeneracy();
  g.length_mm = 20.0;  // wide window so the whole beam is visible
  const auto b1 = pump_profile(g, PumpBeam::first, 2001);
  const auto b2 = pump_profile(g, PumpBeam::second, 2001);
  const double w = g.projected_waist_mm();
  CHECK(g.projected_waist_mm() == Approx(2.4 / std::cos(g.theta_deg * kPi / 180)));
  CHECK(b1.peak_z_mm - b2.peak_z_mm == Approx(kBestCrossing * w).epsilon(1e-12));
  for (std::size_t i = 0; i < b1.z_mm.size(); ++i) {
    if (b1.z_mm[i] > b1.peak_z_mm) CHECK(b1.amplitude[i] == 0.0);
    CHECK(b2.amplitude[b1.z_mm.size() - 1 - i] == b1.amplitude[i]);
  }
  // Half-Gaussian L2 norm^2 = w sqrt(pi/2) / 2.
  // The sharp edge falls between samples: trapezoid error up to one step.
  CHECK(std::abs(b1.l2_norm * b1.l2_norm - w * std::sqrt(kPi / 2) / 2) < 0.01);

  g.delta_z_mm = 0.72;
  const auto c1 = pump_profile(g, PumpBeam::first, 64);
  const auto c2 = pump_profile(g, PumpBeam::second, 64);
  CHECK(c1.peak_z_mm - c2.peak_z_mm == Approx(kBestCrossing * w + 0.72).epsilon(1e-12));
  CHECK_THROWS_AS(pump_profile(g, PumpBeam::first, 63), ValidationError);

  // Default window is the waveguide [-L/2, L/2].
  const auto e = pump_profile(at_degeneracy(), PumpBeam::first, 100);
  CHECK(e.z_mm.front() == -0.9);
  CHECK(e.z_mm.back() == 0.9);
}

TEST_CASE("best crossing constant maximises the mirror overlap") {
  auto overlap = [](double x) { return 2 * std::exp(-x * x / 2) * std::erf(x / std::sqrt(2.0)); };
  const double x = kBestCrossing;
  CHECK(x * std::erf(x / std::sqrt(2.0)) == Approx(std::sqrt(2 / kPi) * std::exp(-x * x / 2)).epsilon(1e-12));
  CHECK(overlap(x) > overlap(x - 1e-4));
  CHECK(overlap(x) > overlap(x + 1e-4));
  CHECK(overlap(x) == Approx(0.8435).epsilon(1e-4));
}

TEST_CASE("overlap_beta matches frequency-domain quadrature") {
  const auto d = DispersionModel::paper_default();
  for (double dz : {0.0, 0.3, 1.0}) {
    const PumpGeometry g = at_degeneracy(dz);
    CHECK(2 * std::abs(overlap_beta(g, d)) == Approx(two_beta_frequency_domain(g, d)).epsilon(2e-4));
  }
  PumpGeometry off = at_degeneracy(0.0);
  off.theta_deg += 0.03;
  CHECK(2 * std::abs(overlap_beta(off, d)) == Approx(two_beta_frequency_domain(off, d)).epsilon(1e-3));
}

TEST_CASE("wide filter reduces beta to the spatial overlap") {
  const auto d = DispersionModel::paper_default();
  for (double dz : {0.0, 0.3, 0.8}) {
    PumpGeometry g = at_degeneracy(dz);
    g.filter_fwhm_nm = 60.0;
    const double x = kBestCrossing + g.delta_z_mm / g.projected_waist_mm();
    const double spatial = 2 * std::exp(-x * x / 2) * std::erf(x / std::sqrt(2.0));
    CHECK(2 * std::abs(overlap_beta(g, d)) == Approx(spatial).epsilon(1e-3));
  }
}

TEST_CASE("overlap model anchors and properties") {
  const auto d = DispersionModel::paper_default();
  const double at0 = 2 * std::abs(overlap_beta(at_degeneracy(0.0), d));
  CHECK(at0 >= 0.76);
  CHECK(at0 <= 0.92);
  CHECK(std::abs(2 * std::abs(overlap_beta(at_degeneracy(0.3), d)) - 0.75) <= 0.06);
  CHECK(std::abs(overlap_beta(at_degeneracy(10.0), d)) < 0.05);

  double prev = 1.0;
  for (int k = 0; k < 20; ++k) {
    const double v = 2 * std::abs(overlap_beta(at_degeneracy(2.0 * k / 19.0), d));
    CHECK(v <= prev + 1e-12);
    CHECK(v <= 1.0);
    prev = v;
  }

  const PumpGeometry base = at_degeneracy(0.3);
  const double peak = std::abs(overlap_beta(base, d));
  for (int k = -10; k <= 10; ++k) {
    if (k == 0) continue;
    PumpGeometry g = base;
    g.theta_deg += 0.01 * k;
    CHECK(std::abs(overlap_beta(g, d)) < peak);
  }

  PumpGeometry neg = base;
  neg.delta_z_mm = -base.delta_z_mm;
  CHECK(concurrence(source_state(neg, d)) == Approx(concurrence(source_state(base, d))).epsilon(1e-12));

  OverlapOptions o;
  o.kappa_s_per_m = 2.0 * (3.0622 + 3.05) / 299792458.0;
  CHECK(std::abs(overlap_beta(base, d, o)) != Approx(peak));
}

TEST_CASE("source state") {
  const auto d = DispersionModel::paper_default();
  const PumpGeometry g = at_degeneracy(0.3);
  const DensityMatrix rho = source_state(g, d);
  CHECK(concurrence(rho) == Approx(2 * std::abs(overlap_beta(g, d))).epsilon(1e-9));
  CHECK(std::abs(concurrence(rho) - 0.75) <= 0.06);
  CHECK(fidelity_to_pure(model_density_matrix({0.5, 0.5, 0.5}), bell_psi_plus()) == Approx(1.0));
  PumpGeometry bad = g;
  bad.waist_mm = 0.0;
  CHECK_THROWS_AS(source_state(bad, d), ValidationError);
}

TEST_CASE("rate budget") {
  const RateBudget b;
  const auto r = expected_rates(b);
  CHECK(r.true_hz == Approx(0.007 * 1e5 * std::pow(0.25 * 0.13, 2)).epsilon(1e-14));
  CHECK(std::abs(r.true_hz - 0.739) < 0.0005);
  CHECK(std::abs(r.true_hz - 0.77) / 0.77 < 0.05);
  CHECK(r.accidental_hz == Approx(1e5 * 6.3e-4 * 6.3e-4).epsilon(1e-12));
  CHECK(std::abs(r.accidental_hz - 0.04) / 0.04 < 0.02);

  RateBudget twice = b;
  twice.pairs_per_pulse *= 2;
  CHECK(expected_rates(twice).true_hz == 2 * r.true_hz);
  CHECK(expected_rates(twice).accidental_hz == r.accidental_hz);

  RateBudget zero = b;
  zero.eta_det = 0.0;
  CHECK(expected_rates(zero).true_hz == 0.0);

  RateBudget bad = b;
  bad.eta_coll = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  CHECK(noise_fraction(0.77, 0.04) == Approx(0.9506).epsilon(1e-4));
  CHECK(noise_fraction(0.5, 0.0) == 1.0);
  CHECK_THROWS_AS(noise_fraction(0.0, 0.0), ValidationError);
  CHECK(fidelity_to_pure(mix_with_white_noise(model_density_matrix({0.5, 0.5, 0.37}), 0.9506), bell_psi_plus()) ==
        Approx(0.9506 * 0.87 + 0.0494 * 0.25).epsilon(1e-12));
}
