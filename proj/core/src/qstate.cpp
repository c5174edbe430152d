#include "twinphoton/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "twinphoton/errors.hpp"

namespace twinphoton {
namespace {

Eigen::Matrix2cd pauli(int axis) {
  const cplx i{0.0, 1.0};
  Eigen::Matrix2cd s;
  switch (axis) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Ket4 product(const Ket2& signal, const Ket2& idler) {
  Ket4 k;
  k << signal(0) * idler(0), signal(0) * idler(1), signal(1) * idler(0), signal(1) * idler(1);
  return k;
}

double born(const Matrix4c& rho, const Ket4& k) {
  return (k.adjoint() * rho * k)(0, 0).real();
}

}  // namespace

PureState::PureState(const Ket4& amplitudes) : amplitudes_(amplitudes) {
  const double n2 = amplitudes.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-12)
    throw ValidationError("pure state is not normalised: squared norm " + std::to_string(n2));
}

DensityMatrix::DensityMatrix(const Matrix4c& elements) : m_(elements) {
  if (!m_.allFinite()) throw ValidationError("density matrix has non-finite entries");
  const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance)
    throw ValidationError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTolerance)
    throw ValidationError("density matrix trace is " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenvalueFloor)
    throw ValidationError("density matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() / 4.0);
}

void ModelParams::validate() const {
  if (!(alpha1 >= 0.0 && alpha1 <= 1.0 && alpha2 >= 0.0 && alpha2 <= 1.0))
    throw ValidationError("alpha1 and alpha2 must lie in [0, 1]");
  if (std::abs(alpha1 + alpha2 - 1.0) > 1e-12)
    throw ValidationError("alpha1 + alpha2 must equal 1");
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw ValidationError("beta must be finite");
  if (std::abs(beta) > std::sqrt(alpha1 * alpha2) + 1e-12)
    throw ValidationError("|beta| exceeds sqrt(alpha1 * alpha2): state would not be positive");
}

PureState bell_psi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  Ket4 k = Ket4::Zero();
  k(kHV) = r;
  k(kVH) = r;
  return PureState(k);
}

DensityMatrix model_density_matrix(const ModelParams& p) {
  p.validate();
  Matrix4c m = Matrix4c::Zero();
  m(kHV, kHV) = p.alpha1;
  m(kVH, kVH) = p.alpha2;
  m(kHV, kVH) = p.beta;
  m(kVH, kHV) = std::conj(p.beta);
  return DensityMatrix(m);
}

DensityMatrix mix_with_white_noise(const DensityMatrix& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("mixing probability must lie in [0, 1]");
  return DensityMatrix(p * rho.matrix() + (1.0 - p) * Matrix4c::Identity() / 4.0);
}

double concurrence(const DensityMatrix& rho) {
  // The Wootters lambdas are the singular values of sqrt(rho) (Y x Y) sqrt(rho)^*,
  // which avoids square roots of nearly vanishing eigenvalues of rho rho~.
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
  const Eigen::Vector4d roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix4c sqrt_rho = es.eigenvectors() * roots.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix4c yy = kron(pauli(1), pauli(1));
  const Eigen::Vector4d lambda = Eigen::JacobiSVD<Matrix4c>(sqrt_rho * yy * sqrt_rho.conjugate()).singularValues();
  return std::clamp(lambda(0) - lambda(1) - lambda(2) - lambda(3), 0.0, 1.0);
}

double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi) {
  return born(rho.matrix(), psi.amplitudes());
}

Ket2 linear_polarization(double angle) {
  return Ket2(std::cos(angle), std::sin(angle));
}

double correlation(const DensityMatrix& rho, double a, double b) {
  const std::array<Ket2, 2> signal{linear_polarization(a), linear_polarization(a + std::numbers::pi / 2)};
  const std::array<Ket2, 2> idler{linear_polarization(b), linear_polarization(b + std::numbers::pi / 2)};
  double e = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double sign = (i == j) ? 1.0 : -1.0;
      e += sign * born(rho.matrix(), product(signal[i], idler[j]));
    }
  return e;
}

double chsh_value(const DensityMatrix& rho, const AnalyzerAngles& g) {
  return std::abs(correlation(rho, g.a, g.b) - correlation(rho, g.a, g.b_prime) +
                  correlation(rho, g.a_prime, g.b) + correlation(rho, g.a_prime, g.b_prime));
}

Eigen::Matrix3d correlation_tensor(const DensityMatrix& rho) {
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (rho.matrix() * kron(pauli(i), pauli(j))).trace().real();
  return t;
}

double chsh_max(const DensityMatrix& rho) {
  const Eigen::Matrix3d t = correlation_tensor(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t, Eigen::EigenvaluesOnly);
  // ascending order
  const double m1 = std::max(0.0, es.eigenvalues()(2));
  const double m2 = std::max(0.0, es.eigenvalues()(1));
  return 2.0 * std::sqrt(m1 + m2);
}

AnalyzerAngles optimal_analyzer_angles(const DensityMatrix& rho) {
  // A linear polariser at angle t measures cos(2t) sigma_z + sin(2t) sigma_x,
  // i.e. the Bloch direction (z, x) = (cos 2t, sin 2t).
  const Eigen::Matrix3d t = correlation_tensor(rho);
  Eigen::Matrix2d k;
  k << t(2, 2), t(2, 0), t(0, 2), t(0, 0);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d s = svd.singularValues();
  const double eta = std::atan2(s(1), s(0));
  const Eigen::Vector2d v1 = svd.matrixV().col(0);
  const Eigen::Vector2d v2 = svd.matrixV().col(1);
  const Eigen::Vector2d b = std::cos(eta) * v1 + std::sin(eta) * v2;
  const Eigen::Vector2d b_prime = std::cos(eta) * v1 - std::sin(eta) * v2;
  const Eigen::Vector2d a = svd.matrixU().col(1);
  const Eigen::Vector2d a_prime = svd.matrixU().col(0);
  auto angle = [](const Eigen::Vector2d& zx) { return 0.5 * std::atan2(zx(1), zx(0)); };
  return {angle(a), angle(a_prime), angle(b), angle(b_prime)};
}

double trace_distance(const Matrix4c& a, const Matrix4c& b) {
  const Matrix4c d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace twinphoton
