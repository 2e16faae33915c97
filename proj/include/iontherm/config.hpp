#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "iontherm/engine.hpp"
#include "iontherm/thermometry.hpp"

namespace iontherm {

enum class SqueezedBaths { None, Bath1, Bath2, Both };

/// Everything a config file can set. `engine` and `protocol` are kept in sync with the flat keys
/// by `resolve`.
struct RunConfig {
  // trap, lab units
  double mass_amu = 0.0;
  double freq_x0_hz = 0.0;
  double freq_z_hz = 0.0;
  double theta_deg = 0.0;
  double r0_m = 0.0;
  // baths
  double t_bath1_mk = 0.0;
  double t_bath2_mk = 0.0;
  double squeeze_r = 0.0;
  double squeeze_alpha = 0.0;
  SqueezedBaths squeeze_baths = SqueezedBaths::Both;
  // engine
  int n_cycles = 4;
  int dim = 0;
  double dt_per_tauz = 1.0 / 2000.0;
  ForceModel force_model = ForceModel::Approximate;
  QuantumBackend backend = QuantumBackend::DensityMatrix;
  double z0_m = 0.0;
  double v0_mps = 0.0;
  int radial_mode_count = 1;
  int sample_every = 1;
  // protocol
  double t0_mk = 1.0;
  int protocol_n = 1000;
  int protocol_m = 1000;
  double sigma_shot_m = 0.0;
  double pulse_fraction = 0.1;
  ProtocolBackend protocol_backend = ProtocolBackend::Analytic;
  std::uint64_t seed = 0;
  // sweeps
  std::vector<double> sweep_delta_t_mk{-0.1, -0.05, 0.0, 0.05, 0.1};
  std::vector<double> sweep_base_mk{1.0, 0.2};
  std::vector<double> sweep_squeeze_r{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};

  TrapConfig trap() const;
  EngineConfig engine() const;
  ProtocolConfig protocol() const;
};

/// Keys accepted in config files and overrides, in documentation order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys and malformed
/// values are ParseErrors carrying the line number. The trap keys and both bath temperatures are
/// required. The result is validated.
RunConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

/// Applies `key=value` overrides after parsing, then re-validates.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Throws Error(InvalidConfig) naming the first violated invariant.
void validate(const RunConfig& cfg);

/// The flat key-value view of a configuration (numbers as written by format_number).
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

/// Shortest round-tripping decimal form of a double.
std::string format_number(double x);

}  // namespace iontherm
