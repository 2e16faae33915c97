#include "iontherm/thermometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <exception>
#include <mutex>
#include <thread>

#include "iontherm/errors.hpp"

namespace iontherm {

namespace {

constexpr int kTrialsPerBlock = 1024;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, message);
}

// One RNG stream per (seed, set, block); the block is the unit of parallel work, so the draws a
// trial sees do not depend on scheduling.
std::mt19937_64 block_stream(std::uint64_t seed, int set, int block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(set), static_cast<std::uint32_t>(block)};
  return std::mt19937_64(seq);
}

// Closed-form trial: stroboscopic map of the sampled initial condition, then the pulse-window
// average of the free oscillation about the bath-2 equilibrium.
struct AnalyticTrial {
  double growth = 0.0;  // per cycle
  double c2 = 0.0;      // equilibrium shift while the radial mode holds the bath-2 state
  double attenuation = 1.0;
  int n_cycles = 0;

  double operator()(const InitialCondition& ic, int set) const {
    const double z_2n = ic.z0 + n_cycles * growth;
    const double swing = attenuation * (z_2n - c2);
    return set == 0 ? c2 + swing : c2 - swing;
  }
};

// Full trial: 2N contacts through the engine, then free evolution with the bath-2 state for one
// (set A) or two (set B) strokes, trapezoid-averaged over the pulse window.
double simulate_trial(const EngineConfig& base, const ProtocolConfig& pcfg,
                      const InitialCondition& ic, int set) {
  EngineConfig cfg = base;
  cfg.z0 = ic.z0;
  cfg.v0 = ic.v0;
  cfg.n_cycles = pcfg.n_cycles;
  cfg.sample_every = 0;
  Engine engine(cfg);
  const int stroke = engine.steps_per_stroke();
  const int half_window = static_cast<int>(std::lround(0.5 * pcfg.pulse_fraction * stroke));
  if (half_window < 1) {
    throw Error(ErrorKind::InvalidConfig, "pulse window is shorter than one time step");
  }
  for (int n = 0; n < 2 * pcfg.n_cycles; ++n) {
    engine.contact(n % 2 == 0 ? 1 : 2);
    if (n + 1 < 2 * pcfg.n_cycles) {
      for (int k = 0; k < stroke; ++k) engine.step();
    }
  }
  const int centre = (set == 0 ? 1 : 2) * stroke;
  const int first = centre - half_window;
  const int last = centre + half_window;
  for (int k = 0; k < first; ++k) engine.step();
  double sum = 0.5 * engine.flywheel().z;
  for (int k = first; k < last; ++k) {
    engine.step();
    sum += (k + 1 == last ? 0.5 : 1.0) * engine.flywheel().z;
  }
  return sum / (last - first);
}

void summarize(const std::vector<double>& xs, double& mean, double& sem) {
  const double n = static_cast<double>(xs.size());
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sem = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace

void validate(const ProtocolConfig& cfg) {
  require(std::isfinite(cfg.t0) && cfg.t0 >= 0.0, "t0 must be >= 0");
  require(cfg.n_cycles >= 1, "protocol N must be >= 1");
  require(cfg.m >= 1, "protocol M must be >= 1");
  require(std::isfinite(cfg.sigma_shot) && cfg.sigma_shot >= 0.0, "sigma_shot must be >= 0");
  require(cfg.pulse_fraction > 0.0 && cfg.pulse_fraction < 0.5,
          "pulse_fraction must lie in (0, 0.5)");
  require(cfg.threads >= 0, "threads must be >= 0");
  require(cfg.max_full_cycles >= 1, "max_full_cycles must be >= 1");
  if (cfg.backend == ProtocolBackend::FullSimulation) {
    require(cfg.n_cycles <= cfg.max_full_cycles,
            "full-simulation protocol limited to N <= " + std::to_string(cfg.max_full_cycles));
  }
}

InitialCondition sample_initial_conditions(double t0, const TrapConfig& trap,
                                           std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double z = unit(rng);
  const double v = unit(rng);
  if (t0 <= 0.0) return {};
  const double sigma_v = std::sqrt(PhysicalConstants::k_boltzmann * t0 / trap.mass);
  return {z * sigma_v / trap.omega_z, v * sigma_v};
}

MeasurementRecord run_protocol(const ProtocolConfig& pcfg, const EngineConfig& engine) {
  validate(pcfg);
  validate(engine);
  const AnalyticContext ctx(engine.trap);

  AnalyticTrial analytic;
  analytic.n_cycles = pcfg.n_cycles;
  analytic.attenuation = pulse_attenuation(pcfg.pulse_fraction);
  {
    const SqueezeSpec none{};
    const double r1 = effective_R(engine.bath_1.temperature,
                                  engine.bath_1.squeeze_after.value_or(none), ctx);
    const double r2 = effective_R(engine.bath_2.temperature,
                                  engine.bath_2.squeeze_after.value_or(none), ctx);
    analytic.growth = 2.0 * ctx.shift_per_R * (r2 - r1);
    analytic.c2 = ctx.shift_per_R * r2;
  }

  MeasurementRecord rec;
  rec.n_cycles = pcfg.n_cycles;
  rec.pulse_fraction = pcfg.pulse_fraction;
  rec.seed = pcfg.seed;
  rec.set_a.assign(pcfg.m, 0.0);
  rec.set_b.assign(pcfg.m, 0.0);

  const int blocks_per_set = (pcfg.m + kTrialsPerBlock - 1) / kTrialsPerBlock;
  const int work_items = 2 * blocks_per_set;
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (int item = next++; item < work_items && !failed; item = next++) {
      const int set = item / blocks_per_set;
      const int block = item % blocks_per_set;
      auto rng = block_stream(pcfg.seed, set, block);
      std::normal_distribution<double> noise(0.0, 1.0);
      auto& out = set == 0 ? rec.set_a : rec.set_b;
      const int begin = block * kTrialsPerBlock;
      const int end = std::min(pcfg.m, begin + kTrialsPerBlock);
      try {
        for (int trial = begin; trial < end; ++trial) {
          const InitialCondition ic = sample_initial_conditions(pcfg.t0, engine.trap, rng);
          const double shot = noise(rng);
          const double z = pcfg.backend == ProtocolBackend::Analytic
                                ? analytic(ic, set)
                                : simulate_trial(engine, pcfg, ic, set);
          out[trial] = z + pcfg.sigma_shot * shot;
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  int threads = pcfg.threads > 0 ? pcfg.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, work_items);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  summarize(rec.set_a, rec.mean_a, rec.sem_a);
  summarize(rec.set_b, rec.mean_b, rec.sem_b);
  return rec;
}

TemperatureEstimate estimate_delta_T(const MeasurementRecord& rec, const AnalyticContext& ctx) {
  if (rec.set_a.empty() || rec.set_b.empty() || rec.n_cycles < 1) {
    throw Error(ErrorKind::InvalidConfig, "measurement record is empty");
  }
  const auto& trap = ctx.trap;
  // Amplitude per kelvin in the high-temperature limit: 2N * 4 k gamma / (m wz^2).
  const double per_kelvin = 8.0 * rec.n_cycles * PhysicalConstants::k_boltzmann *
                            ctx.derived.gamma / (trap.mass * trap.omega_z * trap.omega_z);
  const double attenuation = pulse_attenuation(rec.pulse_fraction);
  TemperatureEstimate est;
  est.amplitude = (rec.mean_a - rec.mean_b) / attenuation;
  est.delta_T_hat = est.amplitude / per_kelvin;
  est.sigma_delta_T = std::hypot(rec.sem_a, rec.sem_b) / attenuation / per_kelvin;
  return est;
}

double sensitivity(double sigma_mean, int n_cycles, const AnalyticContext& ctx) {
  if (!(sigma_mean >= 0.0) || n_cycles < 1) {
    throw Error(ErrorKind::InvalidConfig, "sensitivity needs sigma_mean >= 0 and N >= 1");
  }
  const auto& trap = ctx.trap;
  return std::sqrt(2.0) * sigma_mean * trap.mass * trap.omega_z * trap.omega_z /
         (8.0 * n_cycles * PhysicalConstants::k_boltzmann * ctx.derived.gamma);
}

}  // namespace iontherm
