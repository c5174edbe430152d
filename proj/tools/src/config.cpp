#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "twinphoton/errors.hpp"
#include "twinphoton/serialization.hpp"

namespace twinphoton::cli {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ValidationError("'" + s + "' is not a number");
  return v;
}

template <typename Int>
Int to_integer(const std::string& s) {
  Int v{};
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ValidationError("'" + s + "' is not an integer");
  return v;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(to_double(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_auto_or_double(const std::string& s) {
  if (trim(s) == "auto") return std::nullopt;
  return to_double(s);
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<json(const ExperimentConfig&)> get;
};

#define TP_DOUBLE(sec, name, member)                                                       \
  Field {                                                                                  \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(v); }, \
        [](const ExperimentConfig& c) { return json(c.member); }                           \
  }
#define TP_INT(sec, name, member, type)                                                             \
  Field {                                                                                           \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_integer<type>(v); }, \
        [](const ExperimentConfig& c) { return json(c.member); }                                    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      TP_DOUBLE("dispersion", "reference_nm", dispersion.reference_nm),
      Field{"dispersion", "n_h", [](ExperimentConfig& c, const std::string& v) { c.dispersion.n_h = to_list(v); },
            [](const ExperimentConfig& c) { return json(c.dispersion.n_h); }},
      Field{"dispersion", "n_v", [](ExperimentConfig& c, const std::string& v) { c.dispersion.n_v = to_list(v); },
            [](const ExperimentConfig& c) { return json(c.dispersion.n_v); }},
      TP_DOUBLE("dispersion", "min_nm", dispersion.min_nm),
      TP_DOUBLE("dispersion", "max_nm", dispersion.max_nm),

      TP_DOUBLE("pump", "lambda_p_nm", pump.lambda_p_nm),
      Field{"pump", "theta_deg",
            [](ExperimentConfig& c, const std::string& v) {
              const auto t = to_auto_or_double(v);
              c.theta_auto = !t;
              if (t) c.pump.theta_deg = *t;
            },
            [](const ExperimentConfig& c) { return json(c.pump.theta_deg); }},
      TP_DOUBLE("pump", "waist_mm", pump.waist_mm),
      TP_DOUBLE("pump", "delta_z_mm", pump.delta_z_mm),
      TP_DOUBLE("pump", "length_mm", pump.length_mm),
      TP_DOUBLE("pump", "filter_fwhm_nm", pump.filter_fwhm_nm),

      Field{"source", "kappa_s_per_m",
            [](ExperimentConfig& c, const std::string& v) { c.kappa_s_per_m = to_auto_or_double(v); },
            [](const ExperimentConfig& c) { return c.kappa_s_per_m ? json(*c.kappa_s_per_m) : json("auto"); }},
      Field{"source", "beta", [](ExperimentConfig& c, const std::string& v) { c.beta = to_auto_or_double(v); },
            [](const ExperimentConfig& c) { return c.beta ? json(*c.beta) : json("auto"); }},

      TP_DOUBLE("rates", "pairs_per_pulse", rates.pairs_per_pulse),
      TP_DOUBLE("rates", "rep_rate_hz", rates.rep_rate_hz),
      TP_DOUBLE("rates", "eta_det", rates.eta_det),
      TP_DOUBLE("rates", "eta_coll", rates.eta_coll),
      TP_DOUBLE("rates", "dark_prob_per_gate", rates.dark_prob_per_gate),
      TP_DOUBLE("rates", "stray_prob_per_gate", rates.stray_prob_per_gate),

      TP_DOUBLE("counting", "duration_s", duration_s),
      TP_DOUBLE("counting", "window_ns", histogram.window_ns),
      TP_DOUBLE("counting", "bin_ns", histogram.bin_ns),
      TP_DOUBLE("counting", "jitter_sigma_ns", histogram.jitter_sigma_ns),

      TP_INT("tomography", "mc_samples", mc_samples, int),
      TP_DOUBLE("tomography", "tolerance", mle.tolerance),
      TP_INT("tomography", "max_iterations", mle.max_iterations, int),
      TP_DOUBLE("tomography", "start_mixing", mle.start_mixing),

      TP_DOUBLE("tuning", "theta_min_deg", tuning.theta_min_deg),
      TP_DOUBLE("tuning", "theta_max_deg", tuning.theta_max_deg),
      TP_INT("tuning", "points", tuning.points, int),

      TP_DOUBLE("sweep", "theta_halfwidth_deg", sweep.theta_halfwidth_deg),
      TP_INT("sweep", "theta_points", sweep.theta_points, int),
      TP_DOUBLE("sweep", "delta_z_max_over_wp", sweep.delta_z_max_over_wp),
      TP_INT("sweep", "delta_z_points", sweep.delta_z_points, int),

      TP_INT("run", "seed", seed, std::uint64_t),
      Field{"run", "output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); },
            [](const ExperimentConfig& c) { return json(c.output_dir); }},
  };
  return table;
}

#undef TP_DOUBLE
#undef TP_INT

void assign(ExperimentConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) {
      try {
        f.set(c, value);
      } catch (const ValidationError& e) {
        throw ValidationError("config key [" + section + "] " + key + ": " + e.what());
      }
      return;
    }
  }
  throw ValidationError("unknown config key [" + section + "] " + key);
}

std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += json_scalar_text(e);
    }
    return out;
  }
  throw ValidationError("unsupported config value " + v.dump());
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void ExperimentConfig::resolve() {
  const DispersionModel disp = dispersion.model();
  if (theta_auto) pump.theta_deg = degeneracy_angle(disp, pump.lambda_p_nm);
  pump.validate();
  if (kappa_s_per_m) require(*kappa_s_per_m > 0.0, "[source] kappa_s_per_m must be positive");
  if (beta) require(std::abs(*beta) <= 0.5, "[source] beta must lie in [-1/2, 1/2]");
  rates.validate();
  require(duration_s > 0.0, "[counting] duration_s must be positive");
  histogram.validate();
  require(mc_samples >= 100, "[tomography] mc_samples must be at least 100");
  require(mle.tolerance > 0.0, "[tomography] tolerance must be positive");
  require(mle.max_iterations > 0, "[tomography] max_iterations must be positive");
  require(mle.start_mixing > 0.0 && mle.start_mixing < 1.0, "[tomography] start_mixing must lie in (0, 1)");
  require(tuning.points >= 1, "[tuning] points must be at least 1");
  require(tuning.theta_min_deg <= tuning.theta_max_deg, "[tuning] theta_min_deg exceeds theta_max_deg");
  require(sweep.theta_points >= 1 && sweep.delta_z_points >= 1, "[sweep] grids must be non-empty");
  require(sweep.theta_halfwidth_deg >= 0.0, "[sweep] theta_halfwidth_deg must be non-negative");
  require(sweep.delta_z_max_over_wp >= 0.0, "[sweep] delta_z_max_over_wp must be non-negative");
  require(!output_dir.empty(), "[run] output_dir must not be empty");
}

OverlapOptions ExperimentConfig::overlap_options() const {
  OverlapOptions o;
  o.kappa_s_per_m = kappa_s_per_m;
  return o;
}

TomographyOptions ExperimentConfig::tomography_options() const {
  TomographyOptions o;
  o.mle = mle;
  o.mc_samples = mc_samples;
  o.seed = seed;
  return o;
}

json ExperimentConfig::to_json() const {
  json out = json::object();
  for (const auto& f : fields()) out[f.section][f.key] = f.get(*this);
  return out;
}

ExperimentConfig parse_ini(std::istream& in, std::string_view source) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string(source) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError("config key '" + section + "' is outside a section");
    for (const auto& [key, value] : body) assign(c, section, key, value.data());
  }
  c.resolve();
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config JSON must be an object of sections");
  const json& body = j.contains("config") && j.contains("raw") ? j.at("config") : j;
  ExperimentConfig c;
  for (const auto& [section, keys] : body.items()) {
    if (!keys.is_object()) throw ValidationError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : keys.items()) assign(c, section, key, json_scalar_text(value));
  }
  c.resolve();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
  }
  return parse_ini(in, path.string());
}

}  // namespace twinphoton::cli
