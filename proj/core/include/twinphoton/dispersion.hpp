#pragma once

#include <vector>

namespace twinphoton {

enum class Polarization { H, V };

/// Effective indices of the two guided modes as polynomials in
/// (lambda - reference) with lambda the vacuum wavelength in nm. Evaluation
/// outside [min_nm, max_nm] throws InvalidDispersion.
class DispersionModel {
 public:
  DispersionModel(double reference_nm, std::vector<double> n_h, std::vector<double> n_v,
                  double min_nm, double max_nm);

  /// Indices representative of the AlGaAs ridge around 1518 nm:
  /// n_H = 3.0622, n_V = 3.0500, common slope -1e-4 / nm.
  static DispersionModel paper_default();

  double index(Polarization pol, double lambda_nm) const;
  double n_h(double lambda_nm) const { return index(Polarization::H, lambda_nm); }
  double n_v(double lambda_nm) const { return index(Polarization::V, lambda_nm); }

  bool contains(double lambda_nm) const { return lambda_nm >= min_nm_ && lambda_nm <= max_nm_; }

  double reference_nm() const { return reference_nm_; }
  double min_nm() const { return min_nm_; }
  double max_nm() const { return max_nm_; }
  const std::vector<double>& coefficients(Polarization pol) const {
    return pol == Polarization::H ? n_h_ : n_v_;
  }

 private:
  double reference_nm_;
  std::vector<double> n_h_;
  std::vector<double> n_v_;
  double min_nm_;
  double max_nm_;
};

}  // namespace twinphoton
