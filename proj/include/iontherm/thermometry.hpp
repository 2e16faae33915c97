#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "iontherm/analytics.hpp"
#include "iontherm/engine.hpp"

namespace iontherm {

enum class ProtocolBackend { Analytic, FullSimulation };

struct ProtocolConfig {
  double t0 = 1e-3;            // K, Doppler initialization temperature
  int n_cycles = 1000;         // N: engine cycles before the measurement
  int m = 1000;                // repetitions per measurement set
  double sigma_shot = 0.0;     // m, per-shot localization noise
  double pulse_fraction = 0.1; // imaging pulse length in units of tau_z
  std::uint64_t seed = 0;
  ProtocolBackend backend = ProtocolBackend::Analytic;
  int max_full_cycles = 1000;  // FullSimulation refuses larger N
  int threads = 0;             // 0 picks std::thread::hardware_concurrency()
};

void validate(const ProtocolConfig& cfg);

struct MeasurementRecord {
  std::vector<double> set_a;  // tau_z after the 2N-th contact
  std::vector<double> set_b;  // 2 tau_z after it, the next contact skipped
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sem_a = 0.0;
  double sem_b = 0.0;
  int n_cycles = 0;
  double pulse_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct TemperatureEstimate {
  double delta_T_hat = 0.0;    // K, estimate of T2 - T1
  double sigma_delta_T = 0.0;  // K
  double amplitude = 0.0;      // m, mean_a - mean_b corrected for pulse averaging
};

struct InitialCondition {
  double z0 = 0.0;
  double v0 = 0.0;
};

/// Axial Boltzmann sample at temperature t0 (0 gives the trap centre at rest).
InitialCondition sample_initial_conditions(double t0, const TrapConfig& trap, std::mt19937_64& rng);

/// Runs M trials of each measurement set. Bath temperatures, squeezing, trap and (for
/// FullSimulation) the engine settings come from `engine`; its z0/v0/n_cycles are ignored.
/// Results are identical for any thread count.
MeasurementRecord run_protocol(const ProtocolConfig& pcfg, const EngineConfig& engine);

/// High-temperature inversion of the protocol amplitude.
TemperatureEstimate estimate_delta_T(const MeasurementRecord& rec, const AnalyticContext& ctx);

/// Closed-form standard deviation of the estimate when each set mean is known to sigma_mean.
double sensitivity(double sigma_mean, int n_cycles, const AnalyticContext& ctx);

}  // namespace iontherm
