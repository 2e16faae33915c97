#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iontherm/core_params.hpp"
#include "iontherm/errors.hpp"
#include "reference_values.hpp"
#include "test_support.hpp"

using namespace iontherm;

TEST_CASE("lab units convert once to SI") {
  const auto t = TrapConfig::from_lab_units(40.0, 1e6, 1e5, 30.0, 1e-3);
  CHECK(t.mass == doctest::Approx(40.0 * PhysicalConstants::atomic_mass_unit));
  CHECK(t.omega_x0 == doctest::Approx(2.0 * std::numbers::pi * 1e6));
  CHECK(t.taper_angle == doctest::Approx(std::numbers::pi / 6.0));
}

TEST_CASE("reference trap derived parameters") {
  const auto d = derive_params(TrapConfig::calcium_reference());
  CHECK(testing::rel(d.gamma, ref::kGamma) < 1e-14);
  CHECK(d.kappa == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(d.tau_z == doctest::Approx(5e-6).epsilon(1e-14));
  CHECK(testing::rel(displacement_per_R(TrapConfig::calcium_reference()), ref::kShiftPerR) < 1e-13);
}

TEST_CASE("gamma scales as 1/r0 and vanishes with the taper angle") {
  auto t = TrapConfig::calcium_reference();
  const double g1 = derive_params(t).gamma;
  t.r0 *= 2.0;
  CHECK(derive_params(t).gamma == doctest::Approx(g1 / 2.0).epsilon(1e-14));
  double previous = derive_params(t).gamma;
  for (double deg : {10.0, 1.0, 0.1, 1e-3}) {
    t.taper_angle = deg * std::numbers::pi / 180.0;
    const double g = derive_params(t).gamma;
    CHECK(g < previous);
    previous = g;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("invalid traps are rejected as configuration errors") {
  const auto base = TrapConfig::calcium_reference();
  auto expect_invalid = [](const TrapConfig& t) {
    try {
      validate(t);
      FAIL("validate accepted an invalid trap");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
      CHECK(e.is_config_error());
    }
  };
  auto t = base;
  t.mass = 0.0;
  expect_invalid(t);
  t = base;
  t.omega_z = -1.0;
  expect_invalid(t);
  t = base;
  t.taper_angle = 0.0;
  expect_invalid(t);
  t = base;
  t.taper_angle = std::numbers::pi / 2.0;
  expect_invalid(t);
  t = base;
  t.r0 = NAN;
  expect_invalid(t);
  // radial frequency must exceed the axial one
  t = base;
  t.omega_x0 = 0.5 * t.omega_z;
  expect_invalid(t);
  CHECK_NOTHROW(validate(base));
}
