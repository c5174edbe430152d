#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "twinphoton/errors.hpp"
#include "twinphoton/serialization.hpp"
#include "twinphoton/source.hpp"

namespace twinphoton::cli {
namespace fs = std::filesystem;

namespace {

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path output_path(const ExperimentConfig& config, const char* name) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir + ": " + ec.message());
  return fs::path(config.output_dir) / name;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

DensityMatrix configured_source_state(const ExperimentConfig& config) {
  if (config.beta) return model_density_matrix({0.5, 0.5, *config.beta});
  return source_state(config.pump, config.dispersion.model(), config.overlap_options());
}

std::vector<CountRecord> simulate_records(const ExperimentConfig& config) {
  const auto settings = projector_set_16();
  return simulate_counts(configured_source_state(config), settings, expected_rates(config.rates),
                         config.duration_s, config.seed);
}

void cmd_tuning_curves(const ExperimentConfig& config, std::ostream& log) {
  const DispersionModel disp = config.dispersion.model();
  const double theta_deg = degeneracy_angle(disp, config.pump.lambda_p_nm);
  const auto points = tuning_curves(disp, config.pump.lambda_p_nm, config.tuning.theta_min_deg,
                                    config.tuning.theta_max_deg, config.tuning.points);
  std::ostringstream csv;
  write_tuning_csv(csv, points);
  const fs::path path = output_path(config, "tuning_curves.csv");
  write_file_atomic(path, csv.str());
  log << "theta_deg = " << fmt4(theta_deg) << " deg\n"
      << "wrote " << points.size() << " rows to " << path.string() << '\n';
}

void cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
  const DensityMatrix rho = configured_source_state(config);
  const CoincidenceRates rates = expected_rates(config.rates);
  const double p = noise_fraction(rates);
  const auto settings = projector_set_16();
  const auto records = simulate_counts(rho, settings, rates, config.duration_s, config.seed);

  std::ostringstream csv;
  write_counts_csv(csv, records);
  const fs::path counts_path = output_path(config, "counts.csv");
  write_file_atomic(counts_path, csv.str());

  for (const char* label : {"HH", "HV"}) {
    const Histogram h = simulate_histogram(MeasurementSetting::from_label(label), rho, rates,
                                           config.duration_s, config.histogram, config.seed);
    std::ostringstream out;
    write_histogram_csv(out, h);
    write_file_atomic(output_path(config, ("histogram_" + std::string(label) + ".csv").c_str()), out.str());
  }

  const DensityMatrix rho_raw = mix_with_white_noise(rho, p);
  log << "true rate " << fmt4(rates.true_hz) << " Hz, accidental rate " << fmt4(rates.accidental_hz)
      << " Hz, p = " << fmt4(p) << '\n'
      << "source concurrence " << fmt4(concurrence(rho)) << ", expected raw concurrence "
      << fmt4(concurrence(rho_raw)) << ", raw fidelity " << fmt4(fidelity_to_pure(rho_raw, bell_psi_plus()))
      << '\n'
      << "wrote " << counts_path.string() << " and HH/HV histograms\n";
}

void cmd_reconstruct(const ExperimentConfig& config, const fs::path& counts_csv, std::ostream& log) {
  std::ifstream in(counts_csv);
  if (!in) throw IoError("cannot open counts file " + counts_csv.string());
  const auto records = read_counts_csv(in, counts_csv.string());
  const TomographyResult result = reconstruct(records, config.tomography_options());

  const fs::path path = output_path(config, "tomography.json");
  write_file_atomic(path, to_json(result, config.to_json()).dump(2) + "\n");

  log << "pipeline  concurrence        fidelity           chsh_max           converged\n";
  for (const auto& [name, r] : {std::pair{"raw", &result.raw}, std::pair{"net", &result.net}}) {
    char line[160];
    std::snprintf(line, sizeof line, "%-9s %-8s +- %-6s %-8s +- %-6s %-8s +- %-6s %s%s\n", name,
                  fmt4(r->metrics.concurrence).c_str(), fmt4(r->mc.sigma.concurrence).c_str(),
                  fmt4(r->metrics.fidelity).c_str(), fmt4(r->mc.sigma.fidelity).c_str(),
                  fmt4(r->metrics.chsh_max).c_str(), fmt4(r->mc.sigma.chsh_max).c_str(),
                  r->mle.converged ? "yes" : "NO", r->mc.flagged ? " (MC flagged)" : "");
    log << line;
  }
  log << "wrote " << path.string() << '\n';
}

void cmd_sweep_overlap(const ExperimentConfig& config, std::ostream& log) {
  const DispersionModel disp = config.dispersion.model();
  const auto& s = config.sweep;
  const auto thetas = grid(config.pump.theta_deg - s.theta_halfwidth_deg,
                           config.pump.theta_deg + s.theta_halfwidth_deg, s.theta_points);
  const auto dzs = grid(0.0, s.delta_z_max_over_wp, s.delta_z_points);

  std::ostringstream csv;
  csv << "theta_deg,delta_z_over_wp,concurrence_net\n";
  double best = -1.0, best_theta = 0.0, best_dz = 0.0;
  for (double theta : thetas) {
    for (double dz : dzs) {
      PumpGeometry geom = config.pump;
      geom.theta_deg = theta;
      geom.delta_z_mm = dz * geom.waist_mm;
      const double c = concurrence(source_state(geom, disp, config.overlap_options()));
      csv << format_number(theta) << ',' << format_number(dz) << ',' << format_number(c) << '\n';
      if (c > best) {
        best = c;
        best_theta = theta;
        best_dz = dz;
      }
    }
  }
  const fs::path path = output_path(config, "overlap_sweep.csv");
  write_file_atomic(path, csv.str());
  log << "maximum net concurrence " << fmt4(best) << " at theta = " << fmt4(best_theta)
      << " deg, delta_z = " << fmt4(best_dz) << " w_p\n"
      << "wrote " << thetas.size() * dzs.size() << " rows to " << path.string() << '\n';
}

}  // namespace twinphoton::cli
