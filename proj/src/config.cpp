#include "iontherm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "iontherm/errors.hpp"

namespace iontherm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Thrown by value parsers; the caller adds origin and line.
struct BadValue {
  std::string what;
};

double to_double(std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw BadValue{"expected a finite number, got '" + std::string(v) + "'"};
  }
  return x;
}

long long to_integer(std::string_view v) {
  // Accept integral values written in floating-point notation such as 1e5.
  const double x = to_double(v);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) {
    throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
  }
  return static_cast<long long>(x);
}

int to_int(std::string_view v) {
  const long long x = to_integer(v);
  if (x < INT32_MIN || x > INT32_MAX) throw BadValue{"integer out of range: " + std::string(v)};
  return static_cast<int>(x);
}

std::uint64_t to_seed(std::string_view v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw BadValue{"expected a non-negative 64-bit integer, got '" + std::string(v) + "'"};
  }
  return x;
}

std::vector<double> to_list(std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_double(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw BadValue{"expected a comma-separated list of numbers"};
  return out;
}

template <class Enum>
Enum to_enum(std::string_view v, std::initializer_list<std::pair<const char*, Enum>> names) {
  std::string allowed;
  for (const auto& [name, value] : names) {
    if (v == name) return value;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  throw BadValue{"expected one of {" + allowed + "}, got '" + std::string(v) + "'"};
}

std::string list_string(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : ",") + format_number(x);
  return out;
}

struct Field {
  const char* key;
  bool required;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto real = [&f](const char* key, bool required, double RunConfig::*member) {
      f.push_back({key, required, [member](RunConfig& c, std::string_view v) { c.*member = to_double(v); },
                   [member](const RunConfig& c) { return format_number(c.*member); }});
    };
    auto integer = [&f](const char* key, int RunConfig::*member) {
      f.push_back({key, false, [member](RunConfig& c, std::string_view v) { c.*member = to_int(v); },
                   [member](const RunConfig& c) { return std::to_string(c.*member); }});
    };
    auto list = [&f](const char* key, std::vector<double> RunConfig::*member) {
      f.push_back({key, false, [member](RunConfig& c, std::string_view v) { c.*member = to_list(v); },
                   [member](const RunConfig& c) { return list_string(c.*member); }});
    };
    real("mass_amu", true, &RunConfig::mass_amu);
    real("omega_x0_hz", true, &RunConfig::freq_x0_hz);
    real("omega_z_hz", true, &RunConfig::freq_z_hz);
    real("theta_deg", true, &RunConfig::theta_deg);
    real("r0_m", true, &RunConfig::r0_m);
    real("t_bath1_mk", true, &RunConfig::t_bath1_mk);
    real("t_bath2_mk", true, &RunConfig::t_bath2_mk);
    integer("n_cycles", &RunConfig::n_cycles);
    integer("dim", &RunConfig::dim);
    real("dt_per_tauz", false, &RunConfig::dt_per_tauz);
    f.push_back({"force_model", false,
                 [](RunConfig& c, std::string_view v) {
                   c.force_model = to_enum<ForceModel>(
                       v, {{"approximate", ForceModel::Approximate}, {"exact", ForceModel::Exact}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.force_model == ForceModel::Exact ? "exact" : "approximate");
                 }});
    f.push_back({"backend", false,
                 [](RunConfig& c, std::string_view v) {
                   c.backend = to_enum<QuantumBackend>(
                       v, {{"density_matrix", QuantumBackend::DensityMatrix},
                           {"moments", QuantumBackend::Moments}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.backend == QuantumBackend::Moments ? "moments"
                                                                           : "density_matrix");
                 }});
    real("squeeze_r", false, &RunConfig::squeeze_r);
    real("squeeze_alpha", false, &RunConfig::squeeze_alpha);
    real("t0_mk", false, &RunConfig::t0_mk);
    integer("protocol_n", &RunConfig::protocol_n);
    integer("protocol_m", &RunConfig::protocol_m);
    real("sigma_shot_m", false, &RunConfig::sigma_shot_m);
    f.push_back({"seed", false, [](RunConfig& c, std::string_view v) { c.seed = to_seed(v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    // Keys beyond the core set.
    f.push_back({"squeeze_baths", false,
                 [](RunConfig& c, std::string_view v) {
                   c.squeeze_baths = to_enum<SqueezedBaths>(
                       v, {{"none", SqueezedBaths::None},
                           {"bath1", SqueezedBaths::Bath1},
                           {"bath2", SqueezedBaths::Bath2},
                           {"both", SqueezedBaths::Both}});
                 },
                 [](const RunConfig& c) {
                   switch (c.squeeze_baths) {
                     case SqueezedBaths::None: return std::string("none");
                     case SqueezedBaths::Bath1: return std::string("bath1");
                     case SqueezedBaths::Bath2: return std::string("bath2");
                     case SqueezedBaths::Both: break;
                   }
                   return std::string("both");
                 }});
    real("z0_m", false, &RunConfig::z0_m);
    real("v0_mps", false, &RunConfig::v0_mps);
    integer("radial_mode_count", &RunConfig::radial_mode_count);
    integer("sample_every", &RunConfig::sample_every);
    real("pulse_fraction", false, &RunConfig::pulse_fraction);
    f.push_back({"protocol_backend", false,
                 [](RunConfig& c, std::string_view v) {
                   c.protocol_backend = to_enum<ProtocolBackend>(
                       v, {{"analytic", ProtocolBackend::Analytic},
                           {"full_simulation", ProtocolBackend::FullSimulation}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.protocol_backend == ProtocolBackend::Analytic
                                          ? "analytic"
                                          : "full_simulation");
                 }});
    list("sweep_delta_t_mk", &RunConfig::sweep_delta_t_mk);
    list("sweep_base_mk", &RunConfig::sweep_base_mk);
    list("sweep_squeeze_r", &RunConfig::sweep_squeeze_r);
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

[[noreturn]] void parse_error(std::string_view origin, int line, const std::string& message) {
  throw Error(ErrorKind::ParseError,
              std::string(origin) + ":" + std::to_string(line) + ": " + message);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, message);
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.emplace_back(f.key);
    return k;
  }();
  return keys;
}

TrapConfig RunConfig::trap() const {
  return TrapConfig::from_lab_units(mass_amu, freq_x0_hz, freq_z_hz, theta_deg, r0_m);
}

EngineConfig RunConfig::engine() const {
  EngineConfig e;
  e.trap = trap();
  e.bath_1 = {t_bath1_mk * 1e-3, std::nullopt};
  e.bath_2 = {t_bath2_mk * 1e-3, std::nullopt};
  if (squeeze_r > 0.0) {
    const SqueezeSpec spec{squeeze_r, squeeze_alpha};
    if (squeeze_baths == SqueezedBaths::Bath1 || squeeze_baths == SqueezedBaths::Both) {
      e.bath_1.squeeze_after = spec;
    }
    if (squeeze_baths == SqueezedBaths::Bath2 || squeeze_baths == SqueezedBaths::Both) {
      e.bath_2.squeeze_after = spec;
    }
  }
  e.n_cycles = n_cycles;
  e.dim = dim;
  const double tau_z = 0.5 / freq_z_hz;  // pi / (2 pi f)
  e.dt = dt_per_tauz * tau_z;
  e.force_model = force_model;
  e.quantum_backend = backend;
  e.z0 = z0_m;
  e.v0 = v0_mps;
  e.radial_mode_count = radial_mode_count;
  e.sample_every = sample_every;
  return e;
}

ProtocolConfig RunConfig::protocol() const {
  ProtocolConfig p;
  p.t0 = t0_mk * 1e-3;
  p.n_cycles = protocol_n;
  p.m = protocol_m;
  p.sigma_shot = sigma_shot_m;
  p.pulse_fraction = pulse_fraction;
  p.seed = seed;
  p.backend = protocol_backend;
  return p;
}

void validate(const RunConfig& cfg) {
  require(cfg.mass_amu > 0.0, "mass_amu must be > 0");
  require(cfg.freq_x0_hz > 0.0, "omega_x0_hz must be > 0");
  require(cfg.freq_z_hz > 0.0, "omega_z_hz must be > 0");
  require(cfg.freq_x0_hz > cfg.freq_z_hz, "omega_x0_hz must exceed omega_z_hz");
  require(cfg.theta_deg > 0.0 && cfg.theta_deg < 90.0, "theta_deg must lie in (0, 90)");
  require(cfg.r0_m > 0.0, "r0_m must be > 0");
  validate(cfg.trap());
  require(cfg.t_bath1_mk >= 0.0, "t_bath1_mk must be >= 0");
  require(cfg.t_bath2_mk >= 0.0, "t_bath2_mk must be >= 0");
  require(cfg.squeeze_r >= 0.0, "squeeze_r must be >= 0");
  require(cfg.dt_per_tauz > 0.0 && cfg.dt_per_tauz <= 0.01, "dt_per_tauz must lie in (0, 0.01]");
  const double steps = 1.0 / cfg.dt_per_tauz;
  require(std::abs(steps - std::round(steps)) <= 1e-6 * steps,
          "dt_per_tauz must be the reciprocal of an integer (to one part in 1e6)");
  for (double r : cfg.sweep_squeeze_r) require(r >= 0.0, "sweep_squeeze_r entries must be >= 0");
  for (double t : cfg.sweep_base_mk) require(t >= 0.0, "sweep_base_mk entries must be >= 0");
  for (double b : cfg.sweep_base_mk) {
    for (double d : cfg.sweep_delta_t_mk) {
      require(b + d >= 0.0, "sweep_base_mk + sweep_delta_t_mk must stay >= 0");
    }
  }
  validate(cfg.engine());
  validate(cfg.protocol());
}

RunConfig parse_config_text(std::string_view text, std::string_view origin) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (text.empty()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(origin, line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field* field = find_field(key);
    if (!field) parse_error(origin, line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      parse_error(origin, line_no, "duplicate key '" + std::string(key) + "'");
    }
    if (value.empty()) parse_error(origin, line_no, "missing value for '" + std::string(key) + "'");
    try {
      field->set(cfg, value);
    } catch (const BadValue& bad) {
      parse_error(origin, line_no, std::string(key) + ": " + bad.what);
    }
  }
  for (const auto& f : fields()) {
    if (f.required && !seen.contains(f.key)) {
      throw Error(ErrorKind::InvalidConfig,
                  std::string(origin) + ": missing required key '" + f.key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ParseError, "override '" + item + "' is not key=value");
    }
    const std::string_view key = trim(std::string_view(item).substr(0, eq));
    const std::string_view value = trim(std::string_view(item).substr(eq + 1));
    const Field* field = find_field(key);
    if (!field) throw Error(ErrorKind::ParseError, "override: unknown key '" + std::string(key) + "'");
    try {
      field->set(cfg, value);
    } catch (const BadValue& bad) {
      throw Error(ErrorKind::ParseError, "override " + std::string(key) + ": " + bad.what);
    }
  }
  validate(cfg);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

}  // namespace iontherm
