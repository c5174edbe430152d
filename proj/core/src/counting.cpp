#include "twinphoton/counting.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "twinphoton/errors.hpp"
#include "twinphoton/seeding.hpp"

namespace twinphoton {
namespace {

std::int64_t draw_poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

void check_rates(const CoincidenceRates& rates, double duration_s) {
  if (!(rates.true_hz >= 0.0 && rates.accidental_hz >= 0.0))
    throw ValidationError("coincidence rates must be non-negative");
  if (!(duration_s > 0.0 && std::isfinite(duration_s)))
    throw ValidationError("acquisition duration must be positive");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

Ket2 analyzer_state(char label) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i{0.0, 1.0};
  switch (label) {
    case 'H': return Ket2(1.0, 0.0);
    case 'V': return Ket2(0.0, 1.0);
    case 'D': return Ket2(r, r);
    case 'A': return Ket2(r, -r);
    case 'R': return Ket2(r, -i * r);
    case 'L': return Ket2(r, i * r);
    default: throw ValidationError(std::string("unknown analyser label '") + label + "'");
  }
}

MeasurementSetting MeasurementSetting::from_label(std::string_view label) {
  if (label.size() != 2)
    throw ValidationError("setting label must have two letters, got '" + std::string(label) + "'");
  return {std::string(label), analyzer_state(label[0]), analyzer_state(label[1])};
}

Ket4 MeasurementSetting::ket() const {
  Ket4 k;
  k << signal(0) * idler(0), signal(0) * idler(1), signal(1) * idler(0), signal(1) * idler(1);
  return k;
}

std::vector<MeasurementSetting> projector_set_16() {
  static constexpr const char* kLabels[] = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                            "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
  std::vector<MeasurementSetting> out;
  out.reserve(16);
  for (const char* l : kLabels) out.push_back(MeasurementSetting::from_label(l));
  return out;
}

double coincidence_probability(const DensityMatrix& rho, const MeasurementSetting& setting) {
  const Ket4 k = setting.ket();
  return (k.adjoint() * rho.matrix() * k)(0, 0).real();
}

std::vector<CountRecord> expected_counts(const DensityMatrix& rho_pair,
                                         std::span<const MeasurementSetting> settings,
                                         const CoincidenceRates& rates, double duration_s) {
  check_rates(rates, duration_s);
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (const auto& s : settings) {
    const double acc = duration_s * rates.accidental_hz / 4.0;
    const double mean = duration_s * rates.true_hz * coincidence_probability(rho_pair, s) + acc;
    out.push_back({s, mean, duration_s, acc});
  }
  return out;
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho_pair,
                                         std::span<const MeasurementSetting> settings,
                                         const CoincidenceRates& rates, double duration_s,
                                         std::uint64_t seed) {
  auto records = expected_counts(rho_pair, settings, rates, duration_s);
  for (auto& r : records) {
    std::mt19937_64 rng(derive_seed(seed, "counts:" + r.setting.label));
    r.coincidences = static_cast<double>(draw_poisson(rng, r.coincidences));
  }
  return records;
}

void HistogramOptions::validate() const {
  if (!(window_ns > 0.0 && bin_ns > 0.0 && jitter_sigma_ns > 0.0))
    throw ValidationError("histogram window, bin and jitter must be positive");
  const double n = window_ns / bin_ns;
  if (std::abs(n - std::round(n)) > 1e-9 * n)
    throw ValidationError("histogram bin width must divide the window");
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram simulate_histogram(const MeasurementSetting& setting, const DensityMatrix& rho_pair,
                             const CoincidenceRates& rates, double duration_s,
                             const HistogramOptions& options, std::uint64_t seed) {
  check_rates(rates, duration_s);
  options.validate();
  const auto n_bins = static_cast<std::size_t>(std::llround(options.window_ns / options.bin_ns));

  Histogram h;
  h.label = setting.label;
  h.bin_edges_ns.resize(n_bins + 1);
  const double start = -0.5 * options.window_ns - 0.5 * options.bin_ns;
  for (std::size_t k = 0; k <= n_bins; ++k)
    h.bin_edges_ns[k] = start + options.bin_ns * static_cast<double>(k);

  const double true_mean = duration_s * rates.true_hz * coincidence_probability(rho_pair, setting);
  const double floor_mean = duration_s * rates.accidental_hz / 4.0;

  std::mt19937_64 rng(derive_seed(seed, "histogram:" + setting.label));
  h.counts.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double p_bin = normal_cdf(h.bin_edges_ns[k + 1] / options.jitter_sigma_ns) -
                         normal_cdf(h.bin_edges_ns[k] / options.jitter_sigma_ns);
    h.counts[k] = static_cast<std::uint64_t>(draw_poisson(rng, true_mean * p_bin + floor_mean));
  }
  return h;
}

}  // namespace twinphoton
