#pragma once

// Density-matrix reconstruction from 16-setting coincidence data.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "twinphoton/counting.hpp"
#include "twinphoton/qstate.hpp"

namespace twinphoton {

/// Linear reconstruction from count rates (coincidences / duration). Returns
/// a trace-one Hermitian matrix that need not be positive. Throws
/// InvalidSettings when the settings do not determine the state and
/// ValidationError when there are no counts.
Matrix4c linear_inversion(std::span<const CountRecord> records);

/// Nearest state by eigenvalue clamping: negative eigenvalues set to zero,
/// trace renormalised.
DensityMatrix project_to_physical(const Matrix4c& m);

/// 16 real parameters of a lower-triangular T with rho = T^dag T / tr(T^dag T):
/// the four real diagonal entries, then (re, im) of T(1,0), T(2,0), T(2,1),
/// T(3,0), T(3,1), T(3,2).
using CholeskyParams = Eigen::Matrix<double, 16, 1>;

Matrix4c cholesky_factor(const CholeskyParams& x);
Matrix4c state_from_params(const CholeskyParams& x);

/// Parameters of a positive-definite state (unit norm, tr(T^dag T) = 1).
CholeskyParams params_from_state(const Matrix4c& rho);

/// Poisson log-likelihood with the overall pair rate profiled out:
///   L(rho) = sum_s n_s log(t_s p_s) - N log(sum_s t_s p_s),  p_s = <s|rho|s>.
/// Invariant under uniform rescaling of the durations t_s.
class PoissonLikelihood {
 public:
  explicit PoissonLikelihood(std::span<const CountRecord> records);

  double log_likelihood(const Matrix4c& rho) const;

  /// Objective minimised by the optimiser, -L / N, and its analytic gradient
  /// with respect to the Cholesky parameters.
  double objective(const CholeskyParams& x) const;
  CholeskyParams gradient(const CholeskyParams& x) const;

  double total_counts() const { return total_; }

 private:
  std::vector<Matrix4c> projectors_;  // t_s |s><s|
  std::vector<double> counts_;
  Matrix4c weight_sum_;
  double total_ = 0.0;
};

struct MleOptions {
  double tolerance = 1e-7;   // on || grad(-L/N) ||
  int max_iterations = 2000;
  double start_mixing = 1e-4;  // weight of I/4 mixed into the projected start
};

struct MleResult {
  DensityMatrix rho = DensityMatrix::maximally_mixed();
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  double start_log_likelihood = 0.0;  // at the projected linear-inversion state
  double gradient_norm = 0.0;
};

/// Maximum-likelihood state, started from the positive projection of the
/// linear inversion. Never returns a state less likely than that start.
MleResult mle_reconstruct(std::span<const CountRecord> records, const MleOptions& options = {});

/// Same, from an explicit (positive-definite) starting state.
MleResult mle_reconstruct_from(std::span<const CountRecord> records, const Matrix4c& start,
                               const MleOptions& options = {});

/// Coincidences reduced by the expected accidentals, floored at zero.
std::vector<CountRecord> subtract_accidentals(std::span<const CountRecord> records);

struct StateMetrics {
  double concurrence = 0.0;
  double fidelity = 0.0;  // to |Psi+>
  double chsh_max = 0.0;

  static StateMetrics of(const DensityMatrix& rho);
};

enum class Pipeline { raw, net };

struct McSummary {
  StateMetrics sigma;
  int n_samples = 0;
  int n_dropped = 0;
  bool flagged = false;  // more than 10% of resamples failed to converge
};

/// Poisson resampling of the observed coincidences, each resample rebuilt
/// by MLE (after accidental subtraction for the net pipeline).
McSummary mc_uncertainty(std::span<const CountRecord> records, Pipeline pipeline, int n_samples,
                         std::uint64_t seed, const MleOptions& options = {});

struct Reconstruction {
  MleResult mle;
  StateMetrics metrics;
  McSummary mc;
};

struct TomographyOptions {
  MleOptions mle;
  int mc_samples = 200;
  std::uint64_t seed = 1;
};

struct TomographyResult {
  Reconstruction raw;
  Reconstruction net;
  TomographyOptions options;
};

/// Raw and net reconstructions with Monte-Carlo uncertainties. Requires the
/// records to cover the 16 canonical settings.
TomographyResult reconstruct(std::span<const CountRecord> records, const TomographyOptions& options);

}  // namespace twinphoton
