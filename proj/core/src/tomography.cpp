#include "twinphoton/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "twinphoton/errors.hpp"
#include "twinphoton/seeding.hpp"

namespace twinphoton {
namespace {

constexpr int kOffDiagonal[6][2] = {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};
constexpr double kInfinity = std::numeric_limits<double>::infinity();

Eigen::Matrix2cd pauli_or_identity(int k) {
  const cplx i{0.0, 1.0};
  Eigen::Matrix2cd s;
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

Matrix4c two_qubit_basis(int mu) {
  const Eigen::Matrix2cd a = pauli_or_identity(mu / 4);
  const Eigen::Matrix2cd b = pauli_or_identity(mu % 4);
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Matrix4c hermitian_part(const Matrix4c& m) { return 0.5 * (m + m.adjoint()); }

double sample_sigma(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Matrix4c linear_inversion(std::span<const CountRecord> records) {
  if (records.size() != 16)
    throw InvalidSettings("linear inversion needs exactly 16 records, got " +
                          std::to_string(records.size()));
  Eigen::Matrix<double, 16, 16> b;
  Eigen::Matrix<double, 16, 1> rates;
  double total = 0.0;
  for (int s = 0; s < 16; ++s) {
    const CountRecord& r = records[s];
    if (!(r.duration_s > 0.0)) throw ValidationError("record duration must be positive");
    if (!(r.coincidences >= 0.0)) throw ValidationError("coincidences must be non-negative");
    const Ket4 k = r.setting.ket();
    for (int mu = 0; mu < 16; ++mu)
      b(s, mu) = 0.25 * (k.adjoint() * two_qubit_basis(mu) * k)(0, 0).real();
    rates(s) = r.coincidences / r.duration_s;
    total += r.coincidences;
  }
  if (!(total > 0.0)) throw ValidationError("no coincidences recorded");

  Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(b);
  if (lu.rank() < 16 || lu.rcond() < 1e-12)
    throw InvalidSettings("measurement settings are not informationally complete");
  const Eigen::Matrix<double, 16, 1> c = lu.solve(rates);
  if (!(c(0) > 0.0)) throw ValidationError("reconstructed trace is not positive");

  Matrix4c rho = Matrix4c::Zero();
  for (int mu = 0; mu < 16; ++mu) rho += 0.25 * c(mu) * two_qubit_basis(mu);
  return hermitian_part(rho / rho.trace().real());
}

DensityMatrix project_to_physical(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(hermitian_part(m));
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  if (!(tr > 0.0)) return DensityMatrix::maximally_mixed();
  ev /= tr;
  const Matrix4c out = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(hermitian_part(out));
}

Matrix4c cholesky_factor(const CholeskyParams& x) {
  Matrix4c t = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) t(i, i) = x(i);
  for (int k = 0; k < 6; ++k)
    t(kOffDiagonal[k][0], kOffDiagonal[k][1]) = cplx(x(4 + 2 * k), x(5 + 2 * k));
  return t;
}

Matrix4c state_from_params(const CholeskyParams& x) {
  const Matrix4c t = cholesky_factor(x);
  const Matrix4c a = t.adjoint() * t;
  return hermitian_part(a / a.trace().real());
}

CholeskyParams params_from_state(const Matrix4c& rho) {
  // Reverse the index order so that the ordinary L L^dag factorisation yields
  // rho = T^dag T with T lower triangular.
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
  Eigen::LLT<Matrix4c> llt(j * hermitian_part(rho) * j);
  if (llt.info() != Eigen::Success) throw ValidationError("starting state is not positive definite");
  const Matrix4c l = llt.matrixL();
  const Matrix4c t = (j * l * j).adjoint();
  CholeskyParams x;
  for (int i = 0; i < 4; ++i) x(i) = t(i, i).real();
  for (int k = 0; k < 6; ++k) {
    const cplx v = t(kOffDiagonal[k][0], kOffDiagonal[k][1]);
    x(4 + 2 * k) = v.real();
    x(5 + 2 * k) = v.imag();
  }
  return x / x.norm();
}

PoissonLikelihood::PoissonLikelihood(std::span<const CountRecord> records)
    : weight_sum_(Matrix4c::Zero()) {
  for (const auto& r : records) {
    const Ket4 k = r.setting.ket();
    projectors_.push_back(r.duration_s * (k * k.adjoint()));
    counts_.push_back(r.coincidences);
    weight_sum_ += projectors_.back();
    total_ += r.coincidences;
  }
  if (!(total_ > 0.0)) throw ValidationError("no coincidences recorded");
}

double PoissonLikelihood::log_likelihood(const Matrix4c& rho) const {
  double ll = 0.0;
  for (std::size_t s = 0; s < projectors_.size(); ++s) {
    if (counts_[s] == 0.0) continue;
    const double p = (projectors_[s] * rho).trace().real();
    if (!(p > 0.0)) return -kInfinity;
    ll += counts_[s] * std::log(p);
  }
  return ll - total_ * std::log((weight_sum_ * rho).trace().real());
}

double PoissonLikelihood::objective(const CholeskyParams& x) const {
  const Matrix4c t = cholesky_factor(x);
  return -log_likelihood(t.adjoint() * t) / total_;
}

CholeskyParams PoissonLikelihood::gradient(const CholeskyParams& x) const {
  const Matrix4c t = cholesky_factor(x);
  const Matrix4c a = t.adjoint() * t;
  // dL/dA, then chain rule through A = T^dag T.
  Matrix4c g = -(total_ / (weight_sum_ * a).trace().real()) * weight_sum_;
  for (std::size_t s = 0; s < projectors_.size(); ++s) {
    if (counts_[s] == 0.0) continue;
    g += (counts_[s] / (projectors_[s] * a).trace().real()) * projectors_[s];
  }
  const Matrix4c d = (-2.0 / total_) * (t * g);
  CholeskyParams out;
  for (int i = 0; i < 4; ++i) out(i) = d(i, i).real();
  for (int k = 0; k < 6; ++k) {
    const cplx v = d(kOffDiagonal[k][0], kOffDiagonal[k][1]);
    out(4 + 2 * k) = v.real();
    out(5 + 2 * k) = v.imag();
  }
  return out;
}

MleResult mle_reconstruct_from(std::span<const CountRecord> records, const Matrix4c& start,
                               const MleOptions& options) {
  const PoissonLikelihood model(records);
  using Mat16 = Eigen::Matrix<double, 16, 16>;

  CholeskyParams x = params_from_state(start);
  double f = model.objective(x);
  CholeskyParams g = model.gradient(x);
  Mat16 h = Mat16::Identity();
  bool fresh = true;

  MleResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() < options.tolerance) {
      result.converged = true;
      break;
    }
    CholeskyParams d = -h * g;
    if (g.dot(d) >= 0.0) {
      h.setIdentity();
      fresh = true;
      d = -g;
    }
    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    bool accepted = false;
    CholeskyParams xn;
    double fn = 0.0;
    for (int k = 0; k < 60; ++k) {
      xn = x + step * d;
      fn = model.objective(xn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * g.dot(d)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;  // no descent even along -g
      h.setIdentity();
      fresh = true;
      continue;
    }
    xn /= xn.norm();  // objective is scale invariant; keep tr(T^dag T) = 1
    const CholeskyParams gn = model.gradient(xn);
    const CholeskyParams s = xn - x;
    const CholeskyParams y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (fresh) {
        h = (sy / y.squaredNorm()) * Mat16::Identity();
        fresh = false;
      }
      const double rho_k = 1.0 / sy;
      const Mat16 v = Mat16::Identity() - rho_k * y * s.transpose();
      h = v.transpose() * h * v + rho_k * s * s.transpose();
    }
    x = xn;
    f = fn;
    g = gn;
  }
  if (!result.converged && g.norm() < options.tolerance) result.converged = true;

  result.iterations = it;
  result.gradient_norm = g.norm();
  result.rho = DensityMatrix(state_from_params(x));
  result.log_likelihood = model.log_likelihood(result.rho.matrix());
  result.start_log_likelihood = model.log_likelihood(hermitian_part(start));
  return result;
}

MleResult mle_reconstruct(std::span<const CountRecord> records, const MleOptions& options) {
  const DensityMatrix projected = project_to_physical(linear_inversion(records));
  const double eps = options.start_mixing;
  const Matrix4c start = (1.0 - eps) * projected.matrix() + eps * Matrix4c::Identity() / 4.0;
  MleResult result = mle_reconstruct_from(records, start, options);

  const PoissonLikelihood model(records);
  const double projected_ll = model.log_likelihood(projected.matrix());
  result.start_log_likelihood = projected_ll;
  if (projected_ll >= result.log_likelihood) {
    // Exact or boundary data: the projection already maximises the likelihood.
    result.rho = projected;
    result.log_likelihood = projected_ll;
  }
  return result;
}

std::vector<CountRecord> subtract_accidentals(std::span<const CountRecord> records) {
  std::vector<CountRecord> out(records.begin(), records.end());
  for (auto& r : out) r.coincidences = std::max(0.0, r.coincidences - r.accidental_estimate);
  return out;
}

StateMetrics StateMetrics::of(const DensityMatrix& rho) {
  return {twinphoton::concurrence(rho), fidelity_to_pure(rho, bell_psi_plus()), twinphoton::chsh_max(rho)};
}

McSummary mc_uncertainty(std::span<const CountRecord> records, Pipeline pipeline, int n_samples,
                         std::uint64_t seed, const MleOptions& options) {
  if (n_samples < 100) throw ValidationError("Monte-Carlo uncertainty needs at least 100 samples");
  const std::string stream = pipeline == Pipeline::raw ? "mc-raw:" : "mc-net:";
  std::vector<double> c, f, s;
  McSummary out;
  out.n_samples = n_samples;
  std::vector<CountRecord> sample(records.begin(), records.end());
  for (int i = 0; i < n_samples; ++i) {
    for (std::size_t k = 0; k < records.size(); ++k) {
      std::mt19937_64 rng(derive_seed(seed, stream + records[k].setting.label,
                                      static_cast<std::uint64_t>(i)));
      const double mean = records[k].coincidences;
      sample[k].coincidences =
          mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0;
    }
    try {
      const auto data = pipeline == Pipeline::net ? subtract_accidentals(sample) : sample;
      const MleResult r = mle_reconstruct(data, options);
      if (!r.converged) {
        ++out.n_dropped;
        continue;
      }
      const StateMetrics m = StateMetrics::of(r.rho);
      c.push_back(m.concurrence);
      f.push_back(m.fidelity);
      s.push_back(m.chsh_max);
    } catch (const ValidationError&) {
      ++out.n_dropped;  // e.g. a resample with no counts left
    }
  }
  out.sigma = {sample_sigma(c), sample_sigma(f), sample_sigma(s)};
  out.flagged = out.n_dropped * 10 > n_samples;
  return out;
}

namespace {

void require_canonical_settings(std::span<const CountRecord> records) {
  std::multiset<std::string> present;
  for (const auto& r : records) present.insert(r.setting.label);
  for (const auto& s : projector_set_16()) {
    const auto n = present.count(s.label);
    if (n == 0) throw InvalidSettings("missing tomography setting " + s.label);
    if (n > 1) throw InvalidSettings("duplicate tomography setting " + s.label);
  }
  if (records.size() != 16) throw InvalidSettings("unexpected extra tomography settings");
}

Reconstruction run_pipeline(std::span<const CountRecord> records, Pipeline pipeline,
                            const TomographyOptions& options) {
  Reconstruction out;
  const auto data = pipeline == Pipeline::net ? subtract_accidentals(records)
                                              : std::vector<CountRecord>(records.begin(), records.end());
  out.mle = mle_reconstruct(data, options.mle);
  out.metrics = StateMetrics::of(out.mle.rho);
  out.mc = mc_uncertainty(records, pipeline, options.mc_samples, options.seed, options.mle);
  return out;
}

}  // namespace

TomographyResult reconstruct(std::span<const CountRecord> records, const TomographyOptions& options) {
  require_canonical_settings(records);
  TomographyResult out;
  out.options = options;
  out.raw = run_pipeline(records, Pipeline::raw, options);
  out.net = run_pipeline(records, Pipeline::net, options);
  return out;
}

}  // namespace twinphoton
