#pragma once

// Two-qubit polarization states of a photon pair.
//
// Basis order is fixed everywhere in this library as
//
//     index 0: |HH>   index 1: |HV>   index 2: |VH>   index 3: |VV>
//
// where the first letter is the signal photon (right facet) and the second
// the idler (left facet). H is the TE guided mode, V the TM mode.

#include <array>
#include <complex>

#include <Eigen/Core>

namespace twinphoton {

using cplx = std::complex<double>;
using Ket2 = Eigen::Vector2cd;
using Ket4 = Eigen::Vector4cd;
using Matrix4c = Eigen::Matrix4cd;

enum BasisIndex : int { kHH = 0, kHV = 1, kVH = 2, kVV = 3 };

inline constexpr std::array<const char*, 4> kBasisLabels{"HH", "HV", "VH", "VV"};

class PureState {
 public:
  /// Throws ValidationError unless the squared norm is 1 within 1e-12.
  explicit PureState(const Ket4& amplitudes);

  const Ket4& amplitudes() const { return amplitudes_; }
  cplx operator[](int i) const { return amplitudes_(i); }

 private:
  Ket4 amplitudes_;
};

class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kEigenvalueFloor = -1e-9;

  /// Validates Hermiticity, unit trace and positivity; throws ValidationError.
  explicit DensityMatrix(const Matrix4c& elements);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  const Matrix4c& matrix() const { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

 private:
  Matrix4c m_;
};

/// Source-state parameters: rho = a1 |HV><HV| + a2 |VH><VH| + beta |HV><VH| + h.c.
/// with a1, a2 the pair-generation probabilities of the two
/// interactions and their coherence beta.
struct ModelParams {
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  cplx beta{0.5, 0.0};

  void validate() const;
};

/// Linear-polariser angles (radians) for the two CHSH settings per arm.
/// Angle 0 transmits H, pi/2 transmits V.
struct AnalyzerAngles {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

PureState bell_psi_plus();

DensityMatrix model_density_matrix(const ModelParams& p);

/// p * rho + (1 - p) * I/4.
DensityMatrix mix_with_white_noise(const DensityMatrix& rho, double p);

/// Wootters concurrence.
double concurrence(const DensityMatrix& rho);

/// <psi|rho|psi>.
double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi);

/// Polarisation correlation E(a, b) = P(++) + P(--) - P(+-) - P(-+).
double correlation(const DensityMatrix& rho, double a, double b);

/// |E(a,b) - E(a,b') + E(a',b) + E(a',b')|.
double chsh_value(const DensityMatrix& rho, const AnalyzerAngles& angles);

/// T_ij = tr(rho sigma_i (x) sigma_j), i, j over (x, y, z).
Eigen::Matrix3d correlation_tensor(const DensityMatrix& rho);

/// Maximal CHSH value over all measurement directions (Horodecki).
double chsh_max(const DensityMatrix& rho);

/// Polariser angles maximising chsh_value for rho among linear analysers.
/// Only the x-z block of the correlation tensor is reachable with linear
/// polarisers, so the achieved value equals chsh_max when the dominant
/// correlations lie in that plane.
AnalyzerAngles optimal_analyzer_angles(const DensityMatrix& rho);

/// Trace distance 0.5 * ||a - b||_1.
double trace_distance(const Matrix4c& a, const Matrix4c& b);

/// Linear-polariser pass state cos(t)|H> + sin(t)|V>.
Ket2 linear_polarization(double angle);

}  // namespace twinphoton
