#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "iontherm/config.hpp"
#include "iontherm/errors.hpp"

using namespace iontherm;

namespace {

const std::string kMinimal =
    "mass_amu = 40\n"
    "omega_x0_hz = 1e6\n"
    "omega_z_hz = 1e5\n"
    "theta_deg = 30\n"
    "r0_m = 1e-3\n"
    "t_bath1_mk = 1.2\n"
    "t_bath2_mk = 1.0\n";

Error parse_failure(const std::string& text) {
  try {
    (void)parse_config_text(text, "test.conf");
  } catch (const Error& e) {
    return e;
  }
  FAIL("config accepted: " << text);
  return Error(ErrorKind::InvalidConfig, "");
}

}  // namespace

TEST_CASE("reference file reproduces the calcium trap") {
  const auto cfg = parse_config(IONTHERM_REFERENCE_CONFIG);
  const auto trap = cfg.trap();
  const auto expected = TrapConfig::calcium_reference();
  CHECK(trap.mass == doctest::Approx(expected.mass).epsilon(1e-15));
  CHECK(trap.omega_x0 == doctest::Approx(expected.omega_x0).epsilon(1e-15));
  CHECK(trap.omega_z == doctest::Approx(expected.omega_z).epsilon(1e-15));
  CHECK(trap.taper_angle == doctest::Approx(expected.taper_angle).epsilon(1e-15));
  CHECK(trap.r0 == expected.r0);

  const auto e = cfg.engine();
  CHECK(e.bath_1.temperature == doctest::Approx(1.2e-3));
  CHECK(e.bath_2.temperature == doctest::Approx(1.0e-3));
  CHECK(e.n_cycles == 4);
  CHECK(e.dt == doctest::Approx(5e-6 / 2000.0));
  CHECK(e.z0 == -1.1e-6);
  CHECK(e.quantum_backend == QuantumBackend::DensityMatrix);
  CHECK(cfg.protocol().m == 2000);
}

TEST_CASE("minimal config takes defaults") {
  const auto cfg = parse_config_text(kMinimal);
  CHECK(cfg.n_cycles == 4);
  CHECK(cfg.dim == 0);
  CHECK(cfg.squeeze_r == 0.0);
  CHECK_FALSE(cfg.engine().bath_1.squeeze_after.has_value());
}

TEST_CASE("missing keys are named") {
  const std::string without_mass = kMinimal.substr(kMinimal.find('\n') + 1);
  const auto e = parse_failure(without_mass);
  CHECK(e.is_config_error());
  CHECK(std::string(e.what()).find("mass_amu") != std::string::npos);
}

TEST_CASE("invariant violations are reported by key") {
  const auto zero_theta = parse_failure(kMinimal + "theta_deg = 0\n");
  CHECK(zero_theta.kind() == ErrorKind::ParseError);  // duplicate key wins

  std::string text = kMinimal;
  text.replace(text.find("theta_deg = 30"), 14, "theta_deg = 0");
  const auto e = parse_failure(text);
  CHECK(e.kind() == ErrorKind::InvalidConfig);
  CHECK(std::string(e.what()).find("theta_deg") != std::string::npos);

  text = kMinimal;
  text.replace(text.find("mass_amu = 40"), 13, "mass_amu = -4");
  CHECK(std::string(parse_failure(text).what()).find("mass_amu") != std::string::npos);

  CHECK(parse_failure(kMinimal + "dt_per_tauz = 0.3\n").kind() == ErrorKind::InvalidConfig);
  CHECK(parse_failure(kMinimal + "protocol_m = 0\n").kind() == ErrorKind::InvalidConfig);
}

TEST_CASE("syntax errors carry the line number") {
  const auto unknown = parse_failure(kMinimal + "\n# comment\nmystery = 3\n");
  CHECK(unknown.kind() == ErrorKind::ParseError);
  CHECK(std::string(unknown.what()).find("test.conf:10") != std::string::npos);

  const auto malformed = parse_failure("mass_amu = forty\n" + kMinimal.substr(kMinimal.find('\n') + 1));
  CHECK(std::string(malformed.what()).find("test.conf:1") != std::string::npos);

  CHECK(parse_failure(kMinimal + "n_cycles = 2.5\n").kind() == ErrorKind::ParseError);
  CHECK(parse_failure(kMinimal + "backend = quantum\n").kind() == ErrorKind::ParseError);
  CHECK(parse_failure(kMinimal + "no equals sign\n").kind() == ErrorKind::ParseError);
  CHECK(parse_failure(kMinimal + "seed =\n").kind() == ErrorKind::ParseError);
}

TEST_CASE("overrides apply after parsing and are validated") {
  auto cfg = parse_config_text(kMinimal);
  apply_overrides(cfg, {"n_cycles=12", "backend = moments", "squeeze_r=0.5", "squeeze_baths=bath2"});
  CHECK(cfg.n_cycles == 12);
  CHECK(cfg.backend == QuantumBackend::Moments);
  const auto e = cfg.engine();
  CHECK_FALSE(e.bath_1.squeeze_after.has_value());
  REQUIRE(e.bath_2.squeeze_after.has_value());
  CHECK(e.bath_2.squeeze_after->r == 0.5);

  CHECK_THROWS_AS(apply_overrides(cfg, {"n_cycles"}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, {"n_cycles=0"}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, {"colour=blue"}), Error);
}

TEST_CASE("flat entries round-trip") {
  auto cfg = parse_config(IONTHERM_REFERENCE_CONFIG);
  apply_overrides(cfg, {"sweep_delta_t_mk=-0.1,0,0.1", "squeeze_alpha=0.3"});
  std::string text;
  for (const auto& [k, v] : config_entries(cfg)) text += k + " = " + v + "\n";
  const auto again = parse_config_text(text);
  CHECK(config_entries(again) == config_entries(cfg));
}

TEST_CASE("numbers are written in shortest round-trip form") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e7, 0.0}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e6).size() <= 5);
}
