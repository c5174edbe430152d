#include "twinphoton/dispersion.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "twinphoton/errors.hpp"

namespace twinphoton {
namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

bool plausible_index(double n) { return std::isfinite(n) && n > 1.0 && n < 5.0; }

}  // namespace

DispersionModel::DispersionModel(double reference_nm, std::vector<double> n_h,
                                 std::vector<double> n_v, double min_nm, double max_nm)
    : reference_nm_(reference_nm),
      n_h_(std::move(n_h)),
      n_v_(std::move(n_v)),
      min_nm_(min_nm),
      max_nm_(max_nm) {
  if (n_h_.empty() || n_v_.empty())
    throw InvalidDispersion("dispersion polynomials need at least one coefficient");
  if (!(std::isfinite(reference_nm_) && reference_nm_ > 0.0))
    throw InvalidDispersion("dispersion reference wavelength must be positive");
  if (!(min_nm_ > 0.0 && max_nm_ > min_nm_))
    throw InvalidDispersion("dispersion validity window must satisfy 0 < min < max");
  constexpr int kChecks = 512;
  for (int i = 0; i <= kChecks; ++i) {
    const double lam = min_nm_ + (max_nm_ - min_nm_) * i / kChecks;
    const double x = lam - reference_nm_;
    if (!plausible_index(horner(n_h_, x)) || !plausible_index(horner(n_v_, x)))
      throw InvalidDispersion("effective index leaves (1, 5) at " + std::to_string(lam) + " nm");
  }
}

DispersionModel DispersionModel::paper_default() {
  return DispersionModel(1518.0, {3.0622, -1.0e-4}, {3.0500, -1.0e-4}, 1400.0, 1650.0);
}

double DispersionModel::index(Polarization pol, double lambda_nm) const {
  if (!contains(lambda_nm))
    throw InvalidDispersion("wavelength " + std::to_string(lambda_nm) +
                            " nm outside dispersion window [" + std::to_string(min_nm_) + ", " +
                            std::to_string(max_nm_) + "]");
  const double n = horner(coefficients(pol), lambda_nm - reference_nm_);
  if (!plausible_index(n))
    throw InvalidDispersion("effective index " + std::to_string(n) + " outside (1, 5)");
  return n;
}

}  // namespace twinphoton
