#pragma once

// File formats: density matrices and tomography results as JSON, count
// records, histograms and tuning curves as CSV.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinphoton/counting.hpp"
#include "twinphoton/qstate.hpp"
#include "twinphoton/source.hpp"
#include "twinphoton/tomography.hpp"

namespace twinphoton {

/// Shortest decimal that round-trips to the same double; "NaN" for NaN.
std::string format_number(double v);

nlohmann::json to_json(const Matrix4c& m);
nlohmann::json to_json(const DensityMatrix& rho);
/// Inverse of to_json; validates the basis field and the state invariants.
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

/// Non-finite values (e.g. a -inf log-likelihood) are written as null.
nlohmann::json to_json(const TomographyResult& result, const nlohmann::json& config_echo);

inline constexpr std::string_view kCountsHeader = "setting,coincidences,duration_s,accidental_estimate";
inline constexpr std::string_view kHistogramHeader = "bin_start_ns,bin_end_ns,counts";
inline constexpr std::string_view kTuningHeader =
    "theta_deg,lambda_s1_nm,lambda_i1_nm,lambda_s2_nm,lambda_i2_nm";

void write_counts_csv(std::ostream& out, std::span<const CountRecord> records);

/// Parses the counts CSV. Malformed input throws ValidationError with a
/// "source:line: reason" diagnostic.
std::vector<CountRecord> read_counts_csv(std::istream& in, std::string_view source = "<input>");

void write_histogram_csv(std::ostream& out, const Histogram& histogram);
void write_tuning_csv(std::ostream& out, std::span<const TuningPoint> points);

}  // namespace twinphoton
