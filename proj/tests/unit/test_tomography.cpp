#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "twinphoton/errors.hpp"
#include "twinphoton/serialization.hpp"
#include "twinphoton/tomography.hpp"

using namespace twinphoton;
using doctest::Approx;

namespace {

const CoincidenceRates kShippedRates{0.007 * 1e5 * 0.0325 * 0.0325, 1e5 * 6.3e-4 * 6.3e-4};

double min_eigenvalue(const Matrix4c& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix4c>(m).eigenvalues()(0);
}

// A random state from the source-model family or a random mixed state of
// random rank, alternating.
Matrix4c test_state(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (k % 2 == 0) {
    const double a1 = 0.05 + 0.9 * u(rng);
    const double b = std::sqrt(a1 * (1 - a1)) * u(rng);
    const Matrix4c m = model_density_matrix({a1, 1 - a1, std::polar(b, 6.28 * u(rng))}).matrix();
    return mix_with_white_noise(DensityMatrix(m), 0.5 + 0.5 * u(rng)).matrix();
  }
  return oracle::random_state(rng, 1 + (k / 2) % 4);
}

}  // namespace

TEST_CASE("linear inversion of exact data") {
  const Matrix4c bell = DensityMatrix::from_pure(bell_psi_plus()).matrix();
  CHECK((linear_inversion(oracle::exact_counts(bell, 1e4)) - bell).cwiseAbs().maxCoeff() < 1e-10);
  const Matrix4c mixed = Matrix4c::Identity() / 4.0;
  CHECK((linear_inversion(oracle::exact_counts(mixed, 1e4)) - mixed).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Matrix4c rho = oracle::random_state(rng);
    CHECK((linear_inversion(oracle::exact_counts(rho, 123.0)) - rho).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("linear inversion rejects bad inputs") {
  const Matrix4c bell = DensityMatrix::from_pure(bell_psi_plus()).matrix();
  auto recs = oracle::exact_counts(bell, 100);
  auto dup = recs;
  dup[5].setting = MeasurementSetting::from_label("HH");
  CHECK_THROWS_AS(linear_inversion(dup), InvalidSettings);
  auto few = recs;
  few.pop_back();
  CHECK_THROWS_AS(linear_inversion(few), InvalidSettings);
  auto none = recs;
  for (auto& r : none) r.coincidences = 0;
  CHECK_THROWS_AS(linear_inversion(none), ValidationError);
}

TEST_CASE("finite counts can give a non-physical linear inversion") {
  const auto set = projector_set_16();
  const DensityMatrix near_pure = model_density_matrix({0.5, 0.5, 0.495});
  int negative = 0;
  for (int s = 0; s < 20; ++s) {
    const auto recs = simulate_counts(near_pure, set, {1.0, 0.0}, 30, s);
    const Matrix4c lin = linear_inversion(recs);
    if (min_eigenvalue(lin) < 0) ++negative;
    // The projection and the MLE are always states.
    const DensityMatrix proj = project_to_physical(lin);
    CHECK(min_eigenvalue(proj.matrix()) >= -1e-15);
    CHECK(std::abs(proj.matrix().trace().real() - 1.0) < 1e-12);
    const MleResult mle = mle_reconstruct(recs);
    CHECK(min_eigenvalue(mle.rho.matrix()) >= -1e-12);
    CHECK(std::abs(mle.rho.matrix().trace().real() - 1.0) < 1e-12);
    CHECK(mle.log_likelihood >= mle.start_log_likelihood);
  }
  CHECK(negative > 0);
}

TEST_CASE("PSD projection") {
  Matrix4c d = Matrix4c::Zero();
  d(0, 0) = 0.7;
  d(1, 1) = 0.5;
  d(2, 2) = -0.2;
  const DensityMatrix p = project_to_physical(d);
  CHECK(p.matrix()(0, 0).real() == Approx(0.7 / 1.2));
  CHECK(p.matrix()(1, 1).real() == Approx(0.5 / 1.2));
  CHECK(std::abs(p.matrix()(2, 2)) < 1e-15);

  std::mt19937_64 rng(4);
  const Matrix4c rho = oracle::random_state(rng);
  CHECK((project_to_physical(rho).matrix() - rho).norm() < 1e-14);
}

TEST_CASE("Cholesky parameterisation round trip") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const Matrix4c rho = oracle::random_state(rng);
    const CholeskyParams x = params_from_state(rho);
    CHECK(x.norm() == Approx(1.0).epsilon(1e-14));
    CHECK((state_from_params(x) - rho).norm() < 1e-12);
    const Matrix4c t = cholesky_factor(x);
    CHECK(t.isLowerTriangular(0.0));
    for (int i = 0; i < 4; ++i) CHECK(t(i, i).real() > 0.0);
    // Any parameter vector gives a state.
    std::normal_distribution<double> n(0.0, 1.0);
    CholeskyParams y;
    for (int i = 0; i < 16; ++i) y(i) = n(rng);
    CHECK_NOTHROW(DensityMatrix(state_from_params(y)));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(8);
  const auto set = projector_set_16();
  for (int k = 0; k < 10; ++k) {
    const auto recs = simulate_counts(DensityMatrix(oracle::random_state(rng)), set, {1.0, 0.1}, 500, k);
    const PoissonLikelihood model(recs);
    std::normal_distribution<double> n(0.0, 1.0);
    CholeskyParams x;
    for (int i = 0; i < 16; ++i) x(i) = n(rng);
    const CholeskyParams g = model.gradient(x);
    CholeskyParams fd;
    const double h = 1e-6;
    for (int i = 0; i < 16; ++i) {
      CholeskyParams a = x, b = x;
      a(i) += h;
      b(i) -= h;
      fd(i) = (model.objective(a) - model.objective(b)) / (2 * h);
    }
    CHECK((g - fd).norm() / g.norm() < 1e-5);
  }
}

TEST_CASE("MLE recovers 50 random states from exact counts") {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix4c rho = test_state(rng, k);
    const MleResult r = mle_reconstruct(oracle::exact_counts(rho, 1e5));
    worst = std::max(worst, trace_distance(r.rho.matrix(), rho));
    // Started away from the answer, the optimiser still gets there.
    if (min_eigenvalue(rho) > 1e-3) {
      const MleResult far = mle_reconstruct_from(oracle::exact_counts(rho, 1e5), Matrix4c::Identity() / 4.0);
      CHECK(far.converged);
      CHECK(trace_distance(far.rho.matrix(), rho) < 1e-6);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("MLE never ends below its start and ignores duration scaling") {
  const auto set = projector_set_16();
  const DensityMatrix rho = mix_with_white_noise(model_density_matrix({0.5, 0.5, 0.375}), 0.95);
  for (int s = 0; s < 10; ++s) {
    const auto recs = simulate_counts(rho, set, kShippedRates, 600, s);
    const MleResult a = mle_reconstruct(recs);
    CHECK(a.converged);
    CHECK(a.log_likelihood >= a.start_log_likelihood);
    auto scaled = recs;
    for (auto& r : scaled) r.duration_s *= 3.7;
    const MleResult b = mle_reconstruct(scaled);
    CHECK(trace_distance(a.rho.matrix(), b.rho.matrix()) < 1e-6);
  }
}

TEST_CASE("MLE consistency with growing statistics") {
  const auto set = projector_set_16();
  const DensityMatrix bell = DensityMatrix::from_pure(bell_psi_plus());
  const auto hi = simulate_counts(bell, set, {1.0, 0.0}, 4e5, 3);
  CHECK(fidelity_to_pure(mle_reconstruct(hi).rho, bell_psi_plus()) >= 0.999);

  double prev = 0.0;
  for (double t : {100.0, 1000.0, 10000.0}) {
    double mean = 0.0;
    for (int s = 0; s < 20; ++s)
      mean += fidelity_to_pure(mle_reconstruct(simulate_counts(bell, set, {1.0, 0.0}, t, s)).rho, bell_psi_plus());
    mean /= 20;
    CHECK(mean > prev);
    prev = mean;
  }
}

TEST_CASE("accidental subtraction") {
  CountRecord r;
  r.setting = MeasurementSetting::from_label("HV");
  r.coincidences = 100;
  r.accidental_estimate = 10;
  r.duration_s = 1;
  CountRecord all_acc = r;
  all_acc.coincidences = 3;
  const std::vector<CountRecord> in{r, all_acc};
  const auto out = subtract_accidentals(in);
  CHECK(out[0].coincidences == 90);
  CHECK(out[1].coincidences == 0);
}

TEST_CASE("raw reconstruction at experimental count levels") {
  const auto set = projector_set_16();
  const DensityMatrix source = model_density_matrix({0.5, 0.5, 0.375});
  const auto recs = simulate_counts(source, set, kShippedRates, 600, 1);
  const StateMetrics raw = StateMetrics::of(mle_reconstruct(recs).rho);
  CHECK(std::abs(raw.concurrence - 0.68) <= 0.07);
}

TEST_CASE("Monte-Carlo uncertainties") {
  const auto set = projector_set_16();
  const DensityMatrix source = model_density_matrix({0.5, 0.5, 0.375});
  CHECK_THROWS_AS(mc_uncertainty(simulate_counts(source, set, kShippedRates, 600, 1), Pipeline::raw, 99, 1), ValidationError);

  // Scaling with duration, averaged over a few data sets.
  double s1 = 0, s4 = 0;
  for (int k = 0; k < 4; ++k) {
    s1 += mc_uncertainty(simulate_counts(source, set, kShippedRates, 600, k), Pipeline::raw, 200, 5).sigma.concurrence;
    s4 += mc_uncertainty(simulate_counts(source, set, kShippedRates, 2400, k), Pipeline::raw, 200, 5).sigma.concurrence;
  }
  CHECK(s1 / s4 == Approx(2.0).epsilon(0.2));
  CHECK(std::abs(s1 / 4 - 0.07) <= 0.035);

  const auto recs = simulate_counts(source, set, kShippedRates, 600, 2);
  const McSummary a = mc_uncertainty(recs, Pipeline::net, 1000, 12);
  const McSummary b = mc_uncertainty(recs, Pipeline::net, 1000, 12);
  CHECK(a.sigma.concurrence == b.sigma.concurrence);
  CHECK(a.sigma.fidelity == b.sigma.fidelity);
  CHECK(a.sigma.chsh_max == b.sigma.chsh_max);
  CHECK(a.n_dropped == b.n_dropped);
  CHECK_FALSE(a.flagged);
  CHECK(a.sigma.concurrence > 0.0);
}

TEST_CASE("full reconstruction and JSON") {
  const auto set = projector_set_16();
  const auto recs = simulate_counts(model_density_matrix({0.5, 0.5, 0.375}), set, kShippedRates, 600, 4);
  TomographyOptions opt;
  opt.mc_samples = 100;
  opt.seed = 9;
  const TomographyResult res = reconstruct(recs, opt);
  CHECK(res.raw.mle.converged);
  CHECK(res.net.mle.converged);
  CHECK(res.net.metrics.concurrence >= res.raw.metrics.concurrence);

  const auto j = to_json(res, nlohmann::json{{"run", {{"seed", 9}}}});
  CHECK(j.at("seed") == 9);
  CHECK(j.at("raw").at("rho").at("re").size() == 4);
  CHECK(j.at("net").at("metrics").contains("concurrence_sigma"));
  CHECK(j.at("net").at("mle").at("converged") == true);
  CHECK(j.at("config").at("run").at("seed") == 9);
  const DensityMatrix back = density_matrix_from_json(j.at("net").at("rho"));
  CHECK((back.matrix() - res.net.mle.rho.matrix()).norm() < 1e-15);

  auto missing = recs;
  missing.erase(missing.begin() + 9);  // DD
  try {
    reconstruct(missing, opt);
    FAIL("expected InvalidSettings");
  } catch (const InvalidSettings& e) {
    CHECK(std::string(e.what()).find("DD") != std::string::npos);
  }
}
