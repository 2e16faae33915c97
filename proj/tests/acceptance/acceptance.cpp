// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.
// Usage: iontherm_acceptance [criterion ...]   (default: all of 1..10)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iontherm/analytics.hpp"
#include "iontherm/engine.hpp"
#include "iontherm/fock.hpp"
#include "iontherm/propagator.hpp"
#include "iontherm/thermometry.hpp"

using namespace iontherm;

namespace {

using Clock = std::chrono::steady_clock;

const TrapConfig kTrap = TrapConfig::calcium_reference();
const AnalyticContext kCtx(kTrap);
const double kTauZ = derive_params(kTrap).tau_z;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EngineConfig reference_engine(QuantumBackend backend) {
  EngineConfig cfg;
  cfg.bath_1 = {1.2e-3, std::nullopt};
  cfg.bath_2 = {1.0e-3, std::nullopt};
  cfg.n_cycles = 4;
  cfg.dt = kTauZ / 2000.0;
  cfg.z0 = -1.1e-6;
  cfg.v0 = 0.0;
  cfg.quantum_backend = backend;
  cfg.sample_every = 0;
  return cfg;
}

// The density-matrix reference run is shared by criteria 1, 3 and 9.
struct ReferenceRun {
  EngineTrace trace;
  double seconds = 0.0;
};

const ReferenceRun& reference_dm_run() {
  static const ReferenceRun run = [] {
    const auto t0 = Clock::now();
    ReferenceRun r;
    r.trace = run_engine(reference_engine(QuantumBackend::DensityMatrix));
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome criterion_1() {
  const auto& run = reference_dm_run();
  const double growth = std::abs(delta_z(1.2e-3, 1.0e-3, kCtx));
  double worst = 0.0;
  for (const auto& p : run.trace.peaks) {
    const double map = stroboscopic_position(p.n, -1.1e-6, 1.2e-3, 1.0e-3, kCtx);
    worst = std::max(worst, std::abs(p.z - map) / growth);
  }
  const bool ok = run.trace.dim >= 128 && run.trace.peaks.size() == 9 && worst < 0.01 &&
                  run.seconds < 120.0;
  return {ok, fmt("trajectory vs stroboscopic map: dim %d, %zu peaks, max deviation %.2e of the "
                  "per-cycle growth (limit 1e-2), runtime %.1f s (limit 120 s)",
                  run.trace.dim, run.trace.peaks.size(), worst, run.seconds)};
}

Outcome criterion_2() {
  auto cfg = reference_engine(QuantumBackend::Moments);
  cfg.n_cycles = 50;
  cfg.z0 = 0.0;
  const auto trace = run_engine(cfg);
  // Flywheel energy at the bath-1 contacts, N = number of completed cycles.
  std::vector<double> n, e;
  for (const auto& p : trace.peaks) {
    if (p.n % 2 != 0 || p.n / 2 < 4) continue;
    n.push_back(p.n / 2);
    e.push_back(axial_energy({p.z, p.v, p.t}, kTrap));
  }
  // E = c N^2 through the origin.
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    num += e[i] * n[i] * n[i];
    den += std::pow(n[i], 4);
  }
  const double c = num / den;
  double mean = 0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    ss_res += std::pow(e[i] - c * n[i] * n[i], 2);
    ss_tot += std::pow(e[i] - mean, 2);
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  const bool ok = n.size() == 47 && r2 > 0.999;
  return {ok, fmt("flywheel energy over cycles 4-50 (%zu points): E = c N^2 with c = %.4e J, "
                  "R^2 = %.12f (limit 0.999)",
                  n.size(), c, r2)};
}

Outcome criterion_3() {
  const auto& series = peak_positions(reference_dm_run().trace);
  const auto& even = series.even;
  const double measured = std::abs((even.back().z - even.front().z) / (even.size() - 1.0));
  constexpr double kTarget = 2.43e-10;
  const double exact = std::abs(delta_z(1.2e-3, 1.0e-3, kCtx));
  const double dev_target = std::abs(measured / kTarget - 1.0);
  const double dev_exact = std::abs(measured / exact - 1.0);
  const bool ok = dev_target < 0.05 && dev_exact < 0.005;
  return {ok, fmt("growth per cycle %.5e m: %.2f%% from 2.43e-10 m (limit 5%%), %.4f%% from the "
                  "finite-temperature closed form %.5e m (limit 0.5%%)",
                  measured, 100 * dev_target, 100 * dev_exact, exact)};
}

Outcome criterion_4() {
  const int n_cycles = 1000;
  const double expected = 2.0 * n_cycles * 4.0 * PhysicalConstants::k_boltzmann *
                          kCtx.derived.gamma / (kTrap.mass * kTrap.omega_z * kTrap.omega_z);
  const std::vector<double> deltas{-0.1e-3, -0.05e-3, 0.0, 0.05e-3, 0.1e-3};
  std::string detail = "amplitude slope at N = 1000 against " + fmt("%.5e m/K:", expected);
  bool ok = true;
  std::uint64_t seed = 100;
  for (double base : {1.0e-3, 0.2e-3}) {
    std::vector<double> amp;
    for (double d : deltas) {
      ProtocolConfig p;
      p.t0 = 1e-3;
      p.n_cycles = n_cycles;
      p.m = 200000;
      p.sigma_shot = 0.0;
      p.seed = seed++;
      EngineConfig e;
      e.bath_1 = {base, std::nullopt};
      e.bath_2 = {base + d, std::nullopt};
      amp.push_back(estimate_delta_T(run_protocol(p, e), kCtx).amplitude);
    }
    const double s = slope(deltas, amp);
    // linearity: residuals from the straight-line fit relative to the full swing
    const double intercept = amp[2] - s * deltas[2];
    double worst = 0.0;
    for (std::size_t i = 0; i < deltas.size(); ++i)
      worst = std::max(worst, std::abs(amp[i] - (intercept + s * deltas[i])));
    const double swing = std::abs(amp.back() - amp.front());
    const double dev = std::abs(s / expected - 1.0);
    ok = ok && dev < 0.02 && worst < 0.02 * swing;
    detail += fmt(" base %.1f mK slope %.5e (%.2f%%, limit 2%%), max residual %.2f%% of swing;",
                  base * 1e3, s, 100 * dev, 100 * worst / swing);
  }
  detail.pop_back();
  return {ok, detail};
}

Outcome criterion_5() {
  constexpr double kT1 = 0.11e-3;
  constexpr double kT2 = 0.10e-3;
  constexpr int kCycles = 4;
  const double plain = delta_z(kT1, kT2, kCtx);
  auto growth = [&](double r, QuantumBackend backend) {
    EngineConfig cfg = reference_engine(backend);
    cfg.bath_1 = {kT1, r > 0 ? std::optional<SqueezeSpec>(SqueezeSpec{r, 0.0}) : std::nullopt};
    cfg.bath_2 = {kT2, cfg.bath_1.squeeze_after};
    cfg.n_cycles = kCycles;
    cfg.z0 = 0.0;
    const auto trace = run_engine(cfg);
    return (trace.peaks[2 * kCycles].z - trace.peaks[0].z) / kCycles;
  };
  bool ok = true;
  std::string detail = "amplification over 4 cycles:";
  for (double r : {0.0, 0.5, 1.0, 1.5}) {
    const double a_sim = growth(r, QuantumBackend::Moments) / plain;
    const double a_ref = amplification(r, kCtx.derived.kappa);
    const double dev = std::abs(a_sim / a_ref - 1.0);
    ok = ok && dev < (r == 0.0 ? 0.01 : 0.05);
    detail += fmt(" r=%.1f A=%.4f vs %.4f (%.2f%%);", r, a_sim, a_ref, 100 * dev);
  }
  // Density-matrix cross-check of the moment dynamics with a squeezed bath.
  const double a_dm = growth(0.5, QuantumBackend::DensityMatrix) / plain;
  const double dm_dev = std::abs(a_dm / amplification(0.5, kCtx.derived.kappa) - 1.0);
  ok = ok && dm_dev < 0.05;
  detail += fmt(" density matrix r=0.5 A=%.4f (%.2f%%); limits 5%%, 1%% at r=0", a_dm, 100 * dm_dev);
  return {ok, detail};
}

Outcome criterion_6() {
  const double n_th = thermal_occupation(0.11e-3, kTrap.omega_x0);
  const double r = squeeze_quantum_threshold(n_th);
  return {r >= 1.07 && r <= 1.14,
          fmt("squeezing threshold at n_th = %.4f: r* = %.4f (band [1.07, 1.14])", n_th, r)};
}

Outcome criterion_7() {
  const double closed = sensitivity(250e-9, 100000, kCtx);
  const bool closed_ok = closed >= 1.2e-6 && closed <= 2.2e-6;

  // Reduced M = 2000 with sigma_shot scaled to keep 250 nm per set mean.
  constexpr int kM = 2000;
  constexpr int kN = 100000;
  constexpr int kRuns = 400;
  const double sigma_shot = 250e-9 * std::sqrt(200000.0) * std::sqrt(double(kM) / 200000.0);
  std::vector<double> est;
  for (int run = 0; run < kRuns; ++run) {
    ProtocolConfig p;
    p.t0 = 1e-3;
    p.n_cycles = kN;
    p.m = kM;
    p.sigma_shot = sigma_shot;
    p.seed = 5000 + run;
    EngineConfig e;
    e.bath_1 = {1.0e-3, std::nullopt};
    e.bath_2 = {1.1e-3, std::nullopt};
    est.push_back(estimate_delta_T(run_protocol(p, e), kCtx).delta_T_hat);
  }
  double mean = 0;
  for (double v : est) mean += v;
  mean /= kRuns;
  double ss = 0;
  for (double v : est) ss += (v - mean) * (v - mean);
  const double empirical = std::sqrt(ss / (kRuns - 1));
  const double predicted = sensitivity(sigma_shot / std::sqrt(double(kM)), kN, kCtx);
  const double dev = std::abs(empirical / predicted - 1.0);
  return {closed_ok && dev < 0.2,
          fmt("sensitivity(250 nm, N=1e5) = %.3f uK (band [1.2, 2.2]); Monte Carlo at M=%d, "
              "sigma_shot=%.3e m over %d runs: spread %.3f uK vs predicted %.3f uK (%.1f%%, limit 20%%)",
              closed * 1e6, kM, sigma_shot, kRuns, empirical * 1e6, predicted * 1e6, 100 * dev)};
}

Outcome criterion_8() {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dim_dist(2, 16);
  std::uniform_int_distribution<int> rank_dist(1, 4);
  std::uniform_real_distribution<double> z_dist(-2e-6, 2e-6);
  std::uniform_real_distribution<double> dt_dist(kTauZ / 2000.0, kTauZ / 100.0);

  double worst_step = 0.0;
  double worst_herm = 0.0, worst_trace = 0.0, worst_eig = 0.0;
  bool invariants_ok = true;
  constexpr int kStates = 100;
  constexpr int kLongSteps = 10000;
  for (int s = 0; s < kStates; ++s) {
    const int dim = dim_dist(rng);
    const int rank = std::min(dim, rank_dist(rng));
    Eigen::MatrixXcd g(dim, rank);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < rank; ++j) g(i, j) = {normal(rng), normal(rng)};
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    const RadialState state(rho);

    const PropagationStep step{dt_dist(rng), z_dist(rng)};
    const auto a = newton_propagate(state, step, kTrap);
    const auto b = dense_propagate_oracle(state, step, kTrap);
    const Eigen::MatrixXcd d = a.rho() - b.rho();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (d + d.adjoint()));
    worst_step = std::max(worst_step, 0.5 * solver.eigenvalues().cwiseAbs().sum());

    // Long run along an engine-like path z(t) = z_amp cos(wz t).
    const double z_amp = z_dist(rng);
    const double dt = kTauZ / 1000.0;
    RadialState cur = state;
    for (int k = 0; k < kLongSteps; ++k) {
      const double z = z_amp * std::cos(kTrap.omega_z * (k + 0.5) * dt);
      cur = newton_propagate(cur, {dt, z}, kTrap);
    }
    const auto rep = check_invariants(cur, true);
    worst_herm = std::max(worst_herm, rep.hermiticity_error);
    worst_trace = std::max(worst_trace, rep.trace_error);
    worst_eig = std::min(worst_eig, rep.min_eigenvalue);
    invariants_ok = invariants_ok && rep.hermitian() && rep.unit_trace() && rep.positive();
  }
  return {worst_step < 1e-8 && invariants_ok,
          fmt("Newton vs dense oracle on %d random states (dim <= 16): max trace distance %.2e per "
              "step (limit 1e-8); after %d steps max |rho - rho^+| %.1e, max |Tr - 1| %.1e, "
              "min eigenvalue %.1e",
              kStates, worst_step, kLongSteps, worst_herm, worst_trace, worst_eig)};
}

Outcome criterion_9() {
  const auto& dm = reference_dm_run().trace;
  const auto mom = run_engine(reference_engine(QuantumBackend::Moments));
  double worst = 0.0;
  for (std::size_t n = 0; n < dm.peaks.size(); ++n)
    worst = std::max(worst, std::abs(dm.peaks[n].z - mom.peaks[n].z) / std::abs(dm.peaks[n].z));
  const bool ok = dm.peaks.size() == mom.peaks.size() && dm.peaks.size() == 9 && worst < 1e-4;
  return {ok, fmt("moments vs density matrix over 4 cycles: max relative peak difference %.2e "
                  "(limit 1e-4)",
                  worst)};
}

Outcome criterion_10() {
  const double n = thermal_occupation(1e-3, 2.0 * std::numbers::pi * 1e5);
  return {n >= 205.0 && n <= 212.0,
          fmt("axial thermal occupation at 1 mK, 100 kHz: %.3f (band [205, 212])", n)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 64;
    }
    selected.insert(c);
  }
  if (selected.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.insert(c);

  int failures = 0;
  for (int c : selected) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = criteria[c - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s criterion %2d: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", c,
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures;
}
