#include "twinphoton/serialization.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "twinphoton/errors.hpp"

namespace twinphoton {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& field, const char* name, const std::string& where) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ValidationError(where + ": " + name + " '" + field + "' is not a number");
  return v;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json metrics_json(const StateMetrics& m, const StateMetrics& sigma) {
  return {{"concurrence", m.concurrence},
          {"concurrence_sigma", sigma.concurrence},
          {"fidelity", m.fidelity},
          {"fidelity_sigma", sigma.fidelity},
          {"chsh_max", m.chsh_max},
          {"chsh_max_sigma", sigma.chsh_max}};
}

nlohmann::json reconstruction_json(const Reconstruction& r) {
  return {{"rho", to_json(r.mle.rho)},
          {"metrics", metrics_json(r.metrics, r.mc.sigma)},
          {"mle",
           {{"converged", r.mle.converged},
            {"iterations", r.mle.iterations},
            {"gradient_norm", r.mle.gradient_norm},
            {"log_likelihood", finite_or_null(r.mle.log_likelihood)},
            {"start_log_likelihood", finite_or_null(r.mle.start_log_likelihood)}}},
          {"monte_carlo",
           {{"samples", r.mc.n_samples}, {"dropped", r.mc.n_dropped}, {"flagged", r.mc.flagged}}}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

nlohmann::json to_json(const Matrix4c& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json rr = nlohmann::json::array(), ii = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : kBasisLabels) basis.push_back(b);
  return {{"basis", basis}, {"re", re}, {"im", im}};
}

nlohmann::json to_json(const DensityMatrix& rho) { return to_json(rho.matrix()); }

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  try {
    const auto basis = j.at("basis").get<std::vector<std::string>>();
    if (basis.size() != 4) throw ValidationError("density matrix basis must have 4 labels");
    for (int k = 0; k < 4; ++k)
      if (basis[k] != kBasisLabels[k])
        throw ValidationError("unsupported basis order, expected HH, HV, VH, VV");
    Matrix4c m;
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != 4 || im.size() != 4) throw ValidationError("density matrix must be 4x4");
    for (int r = 0; r < 4; ++r) {
      if (re[r].size() != 4 || im[r].size() != 4) throw ValidationError("density matrix must be 4x4");
      for (int c = 0; c < 4; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return DensityMatrix(m);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed density matrix JSON: ") + e.what());
  }
}

nlohmann::json to_json(const TomographyResult& result, const nlohmann::json& config_echo) {
  return {{"raw", reconstruction_json(result.raw)},
          {"net", reconstruction_json(result.net)},
          {"seed", result.options.seed},
          {"mc_samples", result.options.mc_samples},
          {"config", config_echo}};
}

void write_counts_csv(std::ostream& out, std::span<const CountRecord> records) {
  out << kCountsHeader << '\n';
  for (const auto& r : records)
    out << r.setting.label << ',' << format_number(r.coincidences) << ',' << format_number(r.duration_s)
        << ',' << format_number(r.accidental_estimate) << '\n';
}

std::vector<CountRecord> read_counts_csv(std::istream& in, std::string_view source) {
  std::vector<CountRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != kCountsHeader)
        throw ValidationError(where + ": expected header '" + std::string(kCountsHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 4)
      throw ValidationError(where + ": expected 4 fields, got " + std::to_string(f.size()));
    CountRecord r;
    try {
      r.setting = MeasurementSetting::from_label(f[0]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    r.coincidences = parse_number(f[1], "coincidences", where);
    r.duration_s = parse_number(f[2], "duration_s", where);
    r.accidental_estimate = parse_number(f[3], "accidental_estimate", where);
    if (r.coincidences < 0.0) throw ValidationError(where + ": coincidences must be non-negative");
    if (r.duration_s <= 0.0) throw ValidationError(where + ": duration_s must be positive");
    if (r.accidental_estimate < 0.0)
      throw ValidationError(where + ": accidental_estimate must be non-negative");
    records.push_back(std::move(r));
  }
  if (!header_seen) throw ValidationError(std::string(source) + ": empty counts file");
  return records;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << kHistogramHeader << '\n';
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out << format_number(h.bin_edges_ns[k]) << ',' << format_number(h.bin_edges_ns[k + 1]) << ','
        << h.counts[k] << '\n';
}

void write_tuning_csv(std::ostream& out, std::span<const TuningPoint> points) {
  const double nan = std::nan("");
  out << kTuningHeader << '\n';
  for (const auto& p : points) {
    const WavelengthPair a = p.interaction1.value_or(WavelengthPair{nan, nan});
    const WavelengthPair b = p.interaction2.value_or(WavelengthPair{nan, nan});
    out << format_number(p.theta_deg) << ',' << format_number(a.signal_nm) << ','
        << format_number(a.idler_nm) << ',' << format_number(b.signal_nm) << ','
        << format_number(b.idler_nm) << '\n';
  }
}

}  // namespace twinphoton
