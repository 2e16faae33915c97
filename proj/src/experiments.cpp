#include "iontherm/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "iontherm/analytics.hpp"
#include "iontherm/errors.hpp"

namespace iontherm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// CSV with a header row and scientific-notation numbers.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::initializer_list<const char*> header) : out_(path) {
    if (!out_) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  CsvWriter& operator<<(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15e", x);
    return cell(buf);
  }
  CsvWriter& operator<<(int x) { return cell(std::to_string(x)); }
  CsvWriter& operator<<(const char* s) { return cell(s); }
  void end_row() {
    out_ << '\n';
    fresh_ = true;
  }

 private:
  CsvWriter& cell(const std::string& s) {
    out_ << (fresh_ ? "" : ",") << s;
    fresh_ = false;
    return *this;
  }
  std::ofstream out_;
  bool fresh_ = true;
};

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [key, value] : config_entries(cfg)) j[key] = value;
  return j;
}

SqueezeSpec bath_squeeze(const BathSpec& bath) { return bath.squeeze_after.value_or(SqueezeSpec{}); }

// Effective R of both baths, as seen by the stroboscopic map.
std::pair<double, double> effective_bath_R(const EngineConfig& e, const AnalyticContext& ctx) {
  return {effective_R(e.bath_1.temperature, bath_squeeze(e.bath_1), ctx),
          effective_R(e.bath_2.temperature, bath_squeeze(e.bath_2), ctx)};
}

json trajectory(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
  const EngineConfig e = cfg.engine();
  const AnalyticContext ctx(e.trap);
  const EngineTrace trace = run_engine(e);
  const auto [r1, r2] = effective_bath_R(e, ctx);
  const double growth = 2.0 * ctx.shift_per_R * (r2 - r1);

  files.push_back(dir / "trajectory.csv");
  {
    CsvWriter csv(files.back(), {"t_s", "z_m", "v_mps", "E_fly_J", "E_wm_J", "R", "X", "Y", "N"});
    for (const auto& s : trace.samples) {
      csv << s.t << s.z << s.v << s.e_flywheel << s.e_working_medium << s.R << s.X << s.Y << s.N;
      csv.end_row();
    }
  }
  files.push_back(dir / "peaks.csv");
  double worst = 0.0;
  {
    CsvWriter csv(files.back(), {"n", "t_s", "z_m", "z_map_m", "deviation_m"});
    for (const auto& p : trace.peaks) {
      const double expected = stroboscopic_position_R(p.n, e.z0, r1, r2, ctx);
      worst = std::max(worst, std::abs(p.z - expected));
      csv << p.n << p.t << p.z << expected << (p.z - expected);
      csv.end_row();
    }
  }
  json s;
  s["dim"] = trace.dim;
  s["dt_s"] = trace.dt;
  s["steps_per_stroke"] = trace.steps_per_stroke;
  s["growth_per_cycle_m"] = growth;
  s["max_peak_deviation_m"] = worst;
  s["max_peak_deviation_per_growth"] = growth != 0.0 ? worst / std::abs(growth) : 0.0;
  return s;
}

json energy(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
  EngineConfig e = cfg.engine();
  e.sample_every = 0;
  const AnalyticContext ctx(e.trap);
  const EngineTrace trace = run_engine(e);
  const auto [r1, r2] = effective_bath_R(e, ctx);
  const double k_axial = e.trap.mass * e.trap.omega_z * e.trap.omega_z;

  files.push_back(dir / "energy.csv");
  double sxy = 0.0, sxx = 0.0;
  std::vector<std::pair<double, double>> points;  // (N, E_fly) at bath-1 contacts
  {
    CsvWriter csv(files.back(), {"n", "cycle", "t_s", "E_fly_J", "E_fly_map_J", "E_wm_J"});
    for (std::size_t i = 0; i < trace.contacts.size(); ++i) {
      const auto& c = trace.contacts[i];
      const auto& p = trace.peaks[i];
      const double z = stroboscopic_position_R(c.n, e.z0, r1, r2, ctx);
      const double expected = 0.5 * k_axial * z * z + 0.5 * e.trap.mass * e.v0 * e.v0;
      csv << c.n << c.n / 2 << p.t << c.e_flywheel << expected << c.e_wm_after;
      csv.end_row();
      if (c.n % 2 == 0 && c.n > 0) points.emplace_back(c.n / 2, c.e_flywheel);
    }
  }
  files.push_back(dir / "ledger.csv");
  double worst_closure = 0.0;
  {
    CsvWriter csv(files.back(), {"cycle", "work_J", "heat_bath1_J", "heat_bath2_J",
                                 "delta_E_wm_J", "residual_J"});
    for (const auto& l : trace.cycles) {
      csv << l.cycle << l.work << l.heat_bath1 << l.heat_bath2 << l.delta_e_wm << l.residual();
      csv.end_row();
      const double scale = std::max(std::abs(l.heat_bath1), std::abs(l.heat_bath2));
      if (scale > 0.0) worst_closure = std::max(worst_closure, std::abs(l.residual()) / scale);
    }
  }
  // Least squares E = c N^2 through the origin.
  for (const auto& [n, y] : points) {
    sxy += n * n * y;
    sxx += n * n * n * n;
  }
  json s;
  s["cycles"] = e.n_cycles;
  if (!points.empty() && sxx > 0.0) {
    const double c = sxy / sxx;
    double mean = 0.0;
    for (const auto& pt : points) mean += pt.second;
    mean /= static_cast<double>(points.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [n, y] : points) {
      ss_res += (y - c * n * n) * (y - c * n * n);
      ss_tot += (y - mean) * (y - mean);
    }
    s["quadratic_coefficient_J"] = c;
    s["quadratic_r_squared"] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  s["max_ledger_residual_per_heat"] = worst_closure;
  return s;
}

json delta_t_sweep(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files,
                   int threads) {
  const AnalyticContext ctx(cfg.trap());
  const auto& trap = ctx.trap;
  const double expected_slope = 2.0 * cfg.protocol_n * 4.0 * PhysicalConstants::k_boltzmann *
                                ctx.derived.gamma / (trap.mass * trap.omega_z * trap.omega_z);
  files.push_back(dir / "dt_sweep.csv");
  CsvWriter csv(files.back(), {"base_T_K", "delta_T_K", "amplitude_sim_m", "amplitude_closed_form_m",
                               "delta_T_hat_K", "sigma_delta_T_K"});
  json fits = json::array();
  int point = 0;
  for (double base_mk : cfg.sweep_base_mk) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (double d_mk : cfg.sweep_delta_t_mk) {
      RunConfig c = cfg;
      c.t_bath1_mk = base_mk;
      c.t_bath2_mk = base_mk + d_mk;
      ProtocolConfig p = c.protocol();
      p.seed = cfg.seed + static_cast<std::uint64_t>(point++);
      p.threads = threads;
      const EngineConfig e = c.engine();
      const MeasurementRecord rec = run_protocol(p, e);
      const TemperatureEstimate est = estimate_delta_T(rec, ctx);
      const double t1 = e.bath_1.temperature;
      const double t2 = e.bath_2.temperature;
      const double closed_form = protocol_amplitude(cfg.protocol_n, t1, t2, ctx);
      csv << t1 << (t2 - t1) << est.amplitude << closed_form << est.delta_T_hat << est.sigma_delta_T;
      csv.end_row();
      const double x = t2 - t1;
      sx += x;
      sy += est.amplitude;
      sxx += x * x;
      sxy += x * est.amplitude;
      ++count;
    }
    json f;
    f["base_T_K"] = base_mk * 1e-3;
    if (count >= 2) {
      const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
      f["slope_m_per_K"] = slope;
      f["relative_deviation"] = slope / expected_slope - 1.0;
    }
    fits.push_back(f);
  }
  json s;
  s["expected_slope_m_per_K"] = expected_slope;
  s["fits"] = fits;
  return s;
}

json squeeze_sweep(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
  const AnalyticContext ctx(cfg.trap());
  files.push_back(dir / "squeeze_sweep.csv");
  CsvWriter csv(files.back(),
                {"r", "alpha", "growth_sim_m", "growth_closed_form_m", "A_sim", "A_closed_form"});
  const double reference = delta_z(cfg.t_bath1_mk * 1e-3, cfg.t_bath2_mk * 1e-3, ctx);
  double worst = 0.0;
  for (double r : cfg.sweep_squeeze_r) {
    RunConfig c = cfg;
    c.squeeze_r = r;
    EngineConfig e = c.engine();
    e.sample_every = 0;
    const EngineTrace trace = run_engine(e);
    const double growth = (trace.peaks.back().z - trace.peaks.front().z) / e.n_cycles;
    const auto [r1, r2] = effective_bath_R(e, ctx);
    const double expected = 2.0 * ctx.shift_per_R * (r2 - r1);
    const double a_sim = growth / reference;
    const double a_closed = amplification(r, cfg.squeeze_alpha, ctx.derived.kappa);
    worst = std::max(worst, std::abs(a_sim / a_closed - 1.0));
    csv << r << cfg.squeeze_alpha << growth << expected << a_sim << a_closed;
    csv.end_row();
  }
  json s;
  s["kappa"] = ctx.derived.kappa;
  s["unsqueezed_growth_m"] = reference;
  s["max_relative_deviation"] = worst;
  return s;
}

json protocol(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files,
              int threads) {
  const AnalyticContext ctx(cfg.trap());
  ProtocolConfig p = cfg.protocol();
  p.threads = threads;
  const EngineConfig e = cfg.engine();
  const MeasurementRecord rec = run_protocol(p, e);
  const TemperatureEstimate est = estimate_delta_T(rec, ctx);

  files.push_back(dir / "shots.csv");
  {
    CsvWriter csv(files.back(), {"set", "trial", "z_measured_m"});
    for (int set = 0; set < 2; ++set) {
      const auto& xs = set == 0 ? rec.set_a : rec.set_b;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        csv << (set == 0 ? "A" : "B") << static_cast<int>(i) << xs[i];
        csv.end_row();
      }
    }
  }
  json s;
  s["delta_T_hat_K"] = est.delta_T_hat;
  s["sigma_K"] = est.sigma_delta_T;
  s["amplitude_m"] = est.amplitude;
  s["amplitude_closed_form_m"] =
      protocol_amplitude(p.n_cycles, e.bath_1.temperature, e.bath_2.temperature, ctx);
  s["delta_T_true_K"] = e.bath_2.temperature - e.bath_1.temperature;
  s["sensitivity_K"] = sensitivity(p.sigma_shot / std::sqrt(static_cast<double>(p.m)), p.n_cycles, ctx);
  s["mean_a_m"] = rec.mean_a;
  s["mean_b_m"] = rec.mean_b;
  s["N"] = p.n_cycles;
  s["M"] = p.m;
  s["seed"] = p.seed;
  return s;
}

json threshold(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
  const TrapConfig trap = cfg.trap();
  validate(trap);
  files.push_back(dir / "threshold.csv");
  CsvWriter csv(files.back(), {"bath", "T_K", "n_th", "r_star", "squeeze_r", "quantum"});
  json s = json::array();
  for (int bath = 1; bath <= 2; ++bath) {
    const double t = (bath == 1 ? cfg.t_bath1_mk : cfg.t_bath2_mk) * 1e-3;
    const double n = thermal_occupation(t, trap.omega_x0);
    const double r_star = squeeze_quantum_threshold(n);
    const int quantum = cfg.squeeze_r > r_star ? 1 : 0;
    csv << bath << t << n << r_star << cfg.squeeze_r << quantum;
    csv.end_row();
    s.push_back({{"bath", bath}, {"T_K", t}, {"n_th", n}, {"r_star", r_star}, {"quantum", quantum == 1}});
  }
  return json{{"baths", s}};
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Trajectory: return "trajectory";
    case Command::Energy: return "energy";
    case Command::DeltaTSweep: return "dt-sweep";
    case Command::SqueezeSweep: return "squeeze-sweep";
    case Command::Protocol: return "protocol";
    case Command::Threshold: return "threshold";
  }
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> all{Command::Trajectory,   Command::Energy,
                                        Command::DeltaTSweep,  Command::SqueezeSweep,
                                        Command::Protocol,     Command::Threshold};
  return all;
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : all_commands()) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

ExperimentResult run_experiment(const RunConfig& cfg, Command command, const fs::path& output_dir,
                                int threads) {
  validate(cfg);
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::InvalidConfig,
                "cannot create output directory " + output_dir.string() + ": " + ec.message());
  }
  ExperimentResult result;
  json summary;
  switch (command) {
    case Command::Trajectory: summary = trajectory(cfg, output_dir, result.files); break;
    case Command::Energy: summary = energy(cfg, output_dir, result.files); break;
    case Command::DeltaTSweep:
      summary = delta_t_sweep(cfg, output_dir, result.files, threads);
      break;
    case Command::SqueezeSweep: summary = squeeze_sweep(cfg, output_dir, result.files); break;
    case Command::Protocol: summary = protocol(cfg, output_dir, result.files, threads); break;
    case Command::Threshold: summary = threshold(cfg, output_dir, result.files); break;
  }
  json sidecar;
  sidecar["command"] = to_string(command);
  sidecar["config"] = config_json(cfg);
  sidecar["summary"] = summary;
  json names = json::array();
  for (const auto& f : result.files) names.push_back(f.filename().string());
  sidecar["files"] = names;
  const fs::path path = output_dir / (std::string(to_string(command)) + ".json");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
  out << sidecar.dump(2) << '\n';
  result.files.push_back(path);
  result.summary_json = summary.dump();
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  RunConfig cfg = parse_config(spec.config_path);
  apply_overrides(cfg, spec.overrides);
  if (spec.seed) cfg.seed = *spec.seed;
  return run_experiment(cfg, spec.command, spec.output_dir, spec.threads);
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->is_config_error() ? 2 : 3;
  return 3;
}

std::string error_json(const std::exception& e) {
  json j;
  const auto* err = dynamic_cast<const Error*>(&e);
  j["error"]["kind"] = err ? to_string(err->kind()) : "internal";
  j["error"]["message"] = e.what();
  j["exit_code"] = exit_code_for(e);
  return j.dump();
}

}  // namespace iontherm
