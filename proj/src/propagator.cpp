#include "iontherm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "iontherm/errors.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace iontherm {

namespace {

using cplx = std::complex<double>;

// Above this value of (spectral half-width * dt) the step is split; keeps the divided
// differences well conditioned.
constexpr double kMaxScaledStep = 16.0;

std::vector<double> compute_leja_points(int count) {
  const int candidates = std::max(1024, 8 * count);
  std::vector<double> pool(candidates);
  for (int j = 0; j < candidates; ++j) {
    pool[j] = 2.0 * std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * candidates));
  }
  std::vector<double> points;
  points.reserve(count);
  std::vector<double> log_dist(candidates, 0.0);
  std::vector<bool> used(candidates, false);
  // The first candidate has the largest modulus.
  int pick = 0;
  for (int k = 0; k < count; ++k) {
    if (k > 0) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < candidates; ++j) {
        if (!used[j] && log_dist[j] > best) {
          best = log_dist[j];
          pick = j;
        }
      }
    }
    used[pick] = true;
    points.push_back(pool[pick]);
    for (int j = 0; j < candidates; ++j) {
      if (!used[j]) log_dist[j] += std::log(std::abs(pool[j] - pool[pick]));
    }
  }
  return points;
}

// The selection is O(count * 1024) logarithms, far more than a small step costs, and every
// propagator with the same max_order needs the same set.
const std::vector<double>& leja_chebyshev_points(int count) {
  static std::mutex mutex;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(count);
  if (it == cache.end()) it = cache.emplace(count, compute_leja_points(count)).first;
  return it->second;
}

// Sets flush-to-zero and denormals-are-zero while alive. Coherences in the far corners of the
// density matrix underflow over long runs, and subnormal arithmetic is several times slower.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

// Divided differences of exp(-i c y) on `points`, built by evaluating the interpolant so far.
std::vector<cplx> divided_differences(const std::vector<double>& points, double c) {
  const int n_points = static_cast<int>(points.size());
  std::vector<cplx> a(n_points);
  const cplx minus_i(0.0, -1.0);
  for (int n = 0; n < n_points; ++n) {
    const double yn = points[n];
    cplx p = 0.0;
    double w = 1.0;
    for (int l = 0; l < n; ++l) {
      p += a[l] * w;
      w *= (yn - points[l]);
    }
    a[n] = (std::exp(minus_i * c * yn) - p) / w;
  }
  return a;
}

// Hermitian generator K in rad/s (or rad per unit of the step variable) that only couples n to
// n and n +- 2: K(n, n) = diag[n], K(n, n + 2) = band[n], K(n + 2, n) = conj(band[n]).
struct Generator {
  std::vector<double> diag;
  std::vector<cplx> band;
  bool real_band = true;

  std::pair<double, double> gershgorin() const {
    const int dim = static_cast<int>(diag.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int n = 0; n < dim; ++n) {
      double radius = 0.0;
      if (n + 2 < dim) radius += std::abs(band[n]);
      if (n >= 2) radius += std::abs(band[n - 2]);
      lo = std::min(lo, diag[n] - radius);
      hi = std::max(hi, diag[n] + radius);
    }
    return {lo, hi};
  }
};

// One parity block B (rows in sector P, columns in sector Q) of the density matrix. Real and
// imaginary parts live in separate column-major planes with a one-element zero border, so the
// stencil needs no branches.
struct Plane {
  std::vector<double> re, im;
  void assign(std::size_t n) {
    re.assign(n, 0.0);
    im.assign(n, 0.0);
  }
  void swap(Plane& o) {
    re.swap(o.re);
    im.swap(o.im);
  }
};

// Scaled diagonal and first band of K restricted to one parity sector, zero padded on both ends.
struct Sector {
  std::vector<double> d, ur, ui;

  Sector(const Generator& k, int parity, double scale) {
    const int dim = static_cast<int>(k.diag.size());
    const int size = (dim - parity + 1) / 2;
    d.assign(size + 2, 0.0);
    ur.assign(size + 2, 0.0);
    ui.assign(size + 2, 0.0);
    for (int i = 0; i < size; ++i) {
      const int n = parity + 2 * i;
      d[i + 1] = k.diag[n] * scale;
      if (i + 1 < size) {
        ur[i + 1] = k.band[n].real() * scale;
        ui[i + 1] = k.band[n].imag() * scale;
      }
    }
  }
};

struct Block {
  int row_parity = 0;
  int col_parity = 0;
  int rows = 0;
  int cols = 0;
  Sector p, q;
  Plane v, w, acc;

  Block(int pr, int pc, int r, int c, Sector sp, Sector sq)
      : row_parity(pr), col_parity(pc), rows(r), cols(c), p(std::move(sp)), q(std::move(sq)) {
    const std::size_t size = static_cast<std::size_t>(rows + 2) * (cols + 2);
    v.assign(size);
    w.assign(size);
    acc.assign(size);
  }
  int ld() const { return rows + 2; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + 1) * ld() + static_cast<std::size_t>(i + 1);
  }
};

// v <- (L - y) v and acc += a * v with L B = K_P B - B K_Q. Returns max |new v|^2.
template <bool kComplexBand>
double newton_term(Block& b, double y, cplx a) {
  const std::size_t ld = static_cast<std::size_t>(b.ld());
  const double ar = a.real();
  const double ai = a.imag();
  const int rows = b.rows;
  const double* dp = b.p.d.data() + 1;
  const double* pr = b.p.ur.data() + 1;
  const double* pi = b.p.ui.data() + 1;
  double max_sq = 0.0;
  for (int j = 1; j <= b.cols; ++j) {
    const double shift = b.q.d[j] + y;
    // B K_Q picks up K_Q(j - 1, j) = u_{j-1} from the left and K_Q(j + 1, j) = conj(u_j) from
    // the right neighbour column.
    const double lr = b.q.ur[j - 1];
    const double li = b.q.ui[j - 1];
    const double rr = b.q.ur[j];
    const double ri = b.q.ui[j];
    const std::size_t off = j * ld + 1;
    const double* cr = b.v.re.data() + off;
    const double* ci = b.v.im.data() + off;
    const double* left_r = cr - ld;
    const double* left_i = ci - ld;
    const double* right_r = cr + ld;
    const double* right_i = ci + ld;
    double* out_r = b.w.re.data() + off;
    double* out_i = b.w.im.data() + off;
    double* acc_r = b.acc.re.data() + off;
    double* acc_i = b.acc.im.data() + off;
    double local_max = 0.0;
#pragma omp simd reduction(max : local_max)
    for (int i = 0; i < rows; ++i) {
      const double c0 = dp[i] - shift;
      double re = c0 * cr[i] + pr[i] * cr[i + 1] + pr[i - 1] * cr[i - 1] - lr * left_r[i] -
                  rr * right_r[i];
      double im = c0 * ci[i] + pr[i] * ci[i + 1] + pr[i - 1] * ci[i - 1] - lr * left_i[i] -
                  rr * right_i[i];
      if constexpr (kComplexBand) {
        re += -pi[i] * ci[i + 1] + pi[i - 1] * ci[i - 1] + li * left_i[i] - ri * right_i[i];
        im += pi[i] * cr[i + 1] - pi[i - 1] * cr[i - 1] - li * left_r[i] + ri * right_r[i];
      }
      out_r[i] = re;
      out_i[i] = im;
      acc_r[i] += ar * re - ai * im;
      acc_i[i] += ar * im + ai * re;
      local_max = std::max(local_max, re * re + im * im);
    }
    max_sq = std::max(max_sq, local_max);
  }
  b.v.swap(b.w);
  return max_sq;
}

// rho -> P exp(-i K tau) rho exp(i K tau) P^dagger by a Newton interpolation of exp(-i x tau) on
// the commutator spectrum. P = diag(phase) when given, identity otherwise. The result is projected
// onto its Hermitian part.
ComplexMatrix conjugate_by_exponential(const ComplexMatrix& rho, const Generator& k, double tau,
                                       const NewtonConfig& cfg, const std::vector<double>& points,
                                       NewtonStats* stats, const std::vector<cplx>* phase = nullptr) {
  const int dim = static_cast<int>(rho.rows());
  const FlushSubnormals ftz;
  // Commutator spectrum lies in [-(hi - lo), hi - lo]; map it onto [-2, 2].
  const auto [lo, hi] = k.gershgorin();
  if (stats) *stats = NewtonStats{1, 1};
  // K a multiple of the identity commutes with everything.
  const bool trivial = !(hi > lo);
  if (trivial && !phase) return rho;
  const double scale = trivial ? 1.0 : 0.5 * cfg.spectral_margin * (hi - lo);
  const double full_c = scale * tau;
  const int substeps =
      trivial ? 0 : std::max(1, static_cast<int>(std::ceil(std::abs(full_c) / kMaxScaledStep)));
  const double c = full_c / substeps;
  const auto a = divided_differences(points, c);
  const double inv = 1.0 / scale;

  // Assemble the four parity blocks; blocks that are exactly zero stay zero.
  std::vector<Block> blocks;
  for (int pr = 0; pr < 2; ++pr) {
    for (int pc = 0; pc < 2; ++pc) {
      const int rows = (dim - pr + 1) / 2;
      const int cols = (dim - pc + 1) / 2;
      bool nonzero = false;
      for (int j = 0; j < cols && !nonzero; ++j) {
        for (int i = 0; i < rows; ++i) {
          if (rho(pr + 2 * i, pc + 2 * j) != cplx(0.0, 0.0)) {
            nonzero = true;
            break;
          }
        }
      }
      if (!nonzero) continue;
      Block& b = blocks.emplace_back(pr, pc, rows, cols, Sector(k, pr, inv), Sector(k, pc, inv));
      for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
          const cplx value = rho(pr + 2 * i, pc + 2 * j);
          b.v.re[b.index(i, j)] = value.real();
          b.v.im[b.index(i, j)] = value.imag();
        }
      }
    }
  }

  const int max_terms = static_cast<int>(a.size());
  int used_order = 1;
  for (int s = 0; s < substeps; ++s) {
    for (auto& b : blocks) {
      const double ar = a[0].real();
      const double ai = a[0].imag();
      for (std::size_t i = 0; i < b.v.re.size(); ++i) {
        b.acc.re[i] = ar * b.v.re[i] - ai * b.v.im[i];
        b.acc.im[i] = ar * b.v.im[i] + ai * b.v.re[i];
      }
    }
    int small_in_a_row = 0;
    int n = 1;
    for (; n < max_terms; ++n) {
      double max_sq = 0.0;
      for (auto& b : blocks) {
        const double m = k.real_band ? newton_term<false>(b, points[n - 1], a[n])
                                     : newton_term<true>(b, points[n - 1], a[n]);
        max_sq = std::max(max_sq, m);
      }
      const double term = std::abs(a[n]) * std::sqrt(max_sq);
      small_in_a_row = term < cfg.coeff_tolerance ? small_in_a_row + 1 : 0;
      if (small_in_a_row == 2) break;
    }
    if (n == max_terms) {
      throw Error(ErrorKind::NonConvergence,
                  "Newton series did not converge within " + std::to_string(cfg.max_order) +
                      " terms (scaled step " + std::to_string(c) + ")");
    }
    used_order = std::max(used_order, n + 1);
    // acc has a zero border like v, so it seeds the next substep directly.
    for (auto& b : blocks) b.v.swap(b.acc);
  }

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const auto& b : blocks) {
    for (int j = 0; j < b.cols; ++j) {
      const int col = b.col_parity + 2 * j;
      const cplx pc = phase ? std::conj((*phase)[col]) : cplx(1.0);
      for (int i = 0; i < b.rows; ++i) {
        const int row = b.row_parity + 2 * i;
        cplx value(b.v.re[b.index(i, j)], b.v.im[b.index(i, j)]);
        if (phase) value *= (*phase)[row] * pc;
        out(row, col) = value;
      }
    }
  }
  if (stats) *stats = NewtonStats{used_order, substeps};
  // Project onto the Hermitian part; the exact map preserves it.
  for (int j = 0; j < dim; ++j) {
    out(j, j) = out(j, j).real();
    for (int i = j + 1; i < dim; ++i) {
      const cplx mean = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = mean;
      out(j, i) = std::conj(mean);
    }
  }
  return out;
}

}  // namespace

void validate(const NewtonConfig& cfg) {
  if (cfg.max_order < 4) throw Error(ErrorKind::InvalidConfig, "Newton max_order must be >= 4");
  if (!(cfg.coeff_tolerance > 0.0 && cfg.coeff_tolerance <= 1e-6)) {
    throw Error(ErrorKind::InvalidConfig, "Newton coeff_tolerance must lie in (0, 1e-6]");
  }
  if (!(cfg.spectral_margin >= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "Newton spectral_margin must be >= 1");
  }
}

double coupling_g(double z, const TrapConfig& cfg) {
  const double gamma = std::tan(cfg.taper_angle) / cfg.r0;
  const double s = 1.0 + gamma * z;
  if (!(s > 0.0)) {
    throw Error(ErrorKind::OutOfTaper,
                "axial position " + std::to_string(z) + " m lies outside the taper");
  }
  const double s2 = s * s;
  return 0.25 * PhysicalConstants::hbar * cfg.omega_x0 * (1.0 / (s2 * s2) - 1.0);
}

RealMatrix RadialHamiltonian::dense() const {
  const int n = dim();
  RealMatrix h = diagonal.asDiagonal();
  for (int k = 0; k + 2 < n; ++k) {
    h(k, k + 2) = band2(k);
    h(k + 2, k) = band2(k);
  }
  return h;
}

std::pair<double, double> RadialHamiltonian::spectral_bounds() const {
  const int n = dim();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < n; ++k) {
    double radius = 0.0;
    if (k + 2 < n) radius += std::abs(band2(k));
    if (k >= 2) radius += std::abs(band2(k - 2));
    lo = std::min(lo, diagonal(k) - radius);
    hi = std::max(hi, diagonal(k) + radius);
  }
  return {lo, hi};
}

RadialHamiltonian radial_hamiltonian(int dim, double z, const TrapConfig& cfg) {
  if (dim < 2) throw Error(ErrorKind::InvalidDimension, "Fock dimension must be at least 2");
  const double g = coupling_g(z, cfg);
  const double hw = PhysicalConstants::hbar * cfg.omega_x0;
  RadialHamiltonian h;
  h.diagonal.resize(dim);
  h.band2.resize(std::max(0, dim - 2));
  for (int n = 0; n < dim; ++n) h.diagonal(n) = hw * (n + 0.5) + g * (2.0 * n + 1.0);
  // (a^2)(n, n+2) = sqrt((n+1)(n+2)); X is symmetric.
  for (int n = 0; n + 2 < dim; ++n) {
    h.band2(n) = g * std::sqrt((n + 1.0) * (n + 2.0));
  }
  return h;
}

NewtonPropagator::NewtonPropagator(NewtonConfig cfg) : cfg_(cfg) {
  validate(cfg_);
  points_ = leja_chebyshev_points(cfg_.max_order + 1);
}

std::vector<cplx> NewtonPropagator::coefficients(double c) const {
  return divided_differences(points_, c);
}

RadialState NewtonPropagator::step(const RadialState& state, const RadialHamiltonian& h,
                                   double dt, NewtonStats* stats) const {
  const int dim = state.dim();
  if (h.dim() != dim) {
    throw Error(ErrorKind::InvalidDimension, "Hamiltonian and state dimensions differ");
  }
  if (!std::isfinite(dt) || dt == 0.0) {
    throw Error(ErrorKind::InvalidConfig, "propagation time step must be finite and non-zero");
  }
  Generator k;
  k.diag.resize(dim);
  k.band.assign(dim, 0.0);
  for (int n = 0; n < dim; ++n) k.diag[n] = h.diagonal(n) / PhysicalConstants::hbar;
  for (int n = 0; n + 2 < dim; ++n) k.band[n] = h.band2(n) / PhysicalConstants::hbar;
  return RadialState(conjugate_by_exponential(state.rho(), k, dt, cfg_, points_, stats));
}

RadialState NewtonPropagator::step_rotating(const RadialState& state, double g, double omega_x0,
                                            double dt, NewtonStats* stats) const {
  if (!std::isfinite(dt) || dt == 0.0 || !std::isfinite(g)) {
    throw Error(ErrorKind::InvalidConfig, "propagation time step must be finite and non-zero");
  }
  const int dim = state.dim();
  // H = hbar nu (N + 1/2) + g (a^2 + a^dag^2) with nu = omega_x0 + 2 g / hbar. In the frame of the
  // first term a^2 rotates as exp(-2 i nu t).
  const double gh = g / PhysicalConstants::hbar;
  const double nu = omega_x0 + 2.0 * gh;
  const double two_nu = 2.0 * nu;
  // phi = int_0^dt exp(-2 i nu t) dt; beta from the double integral of sin(2 nu (t1 - t2)).
  const cplx phi = (1.0 - std::exp(cplx(0.0, -two_nu * dt))) / cplx(0.0, two_nu);
  const double beta = (dt - std::sin(two_nu * dt) / two_nu) / two_nu;

  // Effective generator to second Magnus order: G = gh (phi a^2 + conj(phi) a^dag^2)
  // - gh^2 beta [a^2, a^dag^2], the commutator taken on the truncated space.
  Generator k;
  k.real_band = false;
  k.diag.resize(dim);
  k.band.assign(dim, 0.0);
  for (int n = 0; n < dim; ++n) {
    const double up = n + 2 < dim ? (n + 1.0) * (n + 2.0) : 0.0;
    const double down = n * (n - 1.0);
    k.diag[n] = -gh * gh * beta * (up - down);
  }
  for (int n = 0; n + 2 < dim; ++n) k.band[n] = gh * phi * std::sqrt((n + 1.0) * (n + 2.0));

  // Back to the lab frame: rho(m, n) picks up exp(-i nu (m - n) dt).
  std::vector<cplx> phase(dim);
  for (int n = 0; n < dim; ++n) phase[n] = std::exp(cplx(0.0, -nu * dt * n));
  return RadialState(conjugate_by_exponential(state.rho(), k, 1.0, cfg_, points_, stats, &phase));
}

RadialState newton_propagate(const RadialState& state, const PropagationStep& step,
                             const TrapConfig& cfg, const NewtonConfig& ncfg,
                             NewtonStats* stats) {
  const double tau_z = std::numbers::pi / cfg.omega_z;
  if (!(step.dt > 0.0 && step.dt <= tau_z / 100.0 * (1.0 + 1e-12))) {
    throw Error(ErrorKind::InvalidConfig, "propagation step must satisfy 0 < dt <= tau_z/100");
  }
  const NewtonPropagator prop(ncfg);
  return prop.step(state, radial_hamiltonian(state.dim(), step.z, cfg), step.dt, stats);
}

RadialState dense_propagate_oracle(const RadialState& state, const PropagationStep& step,
                                   const TrapConfig& cfg) {
  constexpr int kMaxDim = 64;
  if (state.dim() > kMaxDim) {
    throw Error(ErrorKind::DimensionTooLarge,
                "dense oracle supports dim <= 64, got " + std::to_string(state.dim()));
  }
  const RealMatrix h = radial_hamiltonian(state.dim(), step.z, cfg).dense();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  const cplx minus_i(0.0, -1.0);
  const Eigen::VectorXcd phases = solver.eigenvalues().unaryExpr(
      [&](double l) { return std::exp(minus_i * l * step.dt / PhysicalConstants::hbar); });
  const ComplexMatrix v = solver.eigenvectors().cast<cplx>();
  const ComplexMatrix u = v * phases.asDiagonal() * v.adjoint();
  return RadialState(u * state.rho() * u.adjoint());
}

GaussianMoments moments_step(const GaussianMoments& m, double g, double dt, double omega_x0) {
  // X' = w Y,  Y' = -w X - 4 c N - 2 c,  N' = -c Y  with w = 2(omega + 2g/hbar), c = 2g/hbar.
  // Y'' = -(w^2 - 4c^2) Y, and X, N follow from the integral of Y.
  const double c = 2.0 * g / PhysicalConstants::hbar;
  const double w = 2.0 * omega_x0 + 2.0 * c;
  const double freq = std::sqrt(w * w - 4.0 * c * c);
  const double y_rate = -w * m.X - 4.0 * c * m.N - 2.0 * c;
  const double phase = freq * dt;
  const double s = std::sin(phase);
  const double half = std::sin(0.5 * phase);
  const double one_minus_cos = 2.0 * half * half;
  const double y = m.Y * std::cos(phase) + y_rate * s / freq;
  const double integral = m.Y * s / freq + y_rate * one_minus_cos / (freq * freq);
  return {m.X + w * integral, y, m.N - c * integral};
}

GaussianMoments moments_propagate(const GaussianMoments& m, std::span<const double> z_samples,
                                  double dt, const TrapConfig& cfg) {
  GaussianMoments out = m;
  for (std::size_t k = 0; k + 1 < z_samples.size(); ++k) {
    const double z_mid = 0.5 * (z_samples[k] + z_samples[k + 1]);
    out = moments_step(out, coupling_g(z_mid, cfg), dt, cfg.omega_x0);
  }
  return out;
}

}  // namespace iontherm
