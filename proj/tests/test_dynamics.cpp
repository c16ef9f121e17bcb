#include <catch2/catch.hpp>

#include <cmath>

#include "coilsim/dynamics.hpp"
#include "oracles.hpp"

using namespace coilsim;

namespace {

const CoilElectrical kCoil{36e-6, 0.6};
const Capacitor kCap{0.12, 45.0, 0.0};

const LoopStack& single_stack() {
  static const LoopStack stack = digitize(preset("single"), WireSpec{}, TubeSpec{});
  return stack;
}

}  // namespace

TEST_CASE("induced moment is zero at rest, clamps at saturation, follows sign") {
  Projectile rod;
  rod.mass = 1e-3;
  rod.model = InducedDipole{0.5, 0.3};
  CHECK(dipole_moment(rod, 0.0) == 0.0);
  CHECK(dipole_moment(rod, 1.0) == 0.3);
  CHECK(dipole_moment(rod, -1.0) == -0.3);
  CHECK(dipole_moment(rod, 0.2) == Approx(0.1));
  CHECK(dipole_moment(rod, -0.2) == Approx(-0.1));
}

TEST_CASE("permanent moment ignores the field") {
  Projectile slug;
  slug.mass = 6.06e-3;
  slug.model = PermanentDipole{0.932};
  for (double B : {-2.0, 0.0, 0.5}) CHECK(dipole_moment(slug, B) == 0.932);
}

TEST_CASE("stock N52 moment derives from mass and bulk NdFeB numbers") {
  CHECK(ndfeb_moment_from_mass(6.06e-3) == Approx(0.932).epsilon(1e-3));
  const Projectile slug = n52_projectile();
  CHECK(std::get<PermanentDipole>(slug.model).moment == Approx(0.932).epsilon(1e-3));
  CHECK(slug.mass == Approx(6.06e-3));
}

TEST_CASE("no force at the center of a symmetric energized coil") {
  const auto& stack = single_stack();
  const double center = 0.5 * (stack.min_x() + stack.max_x());
  const FieldSample fs = superpose(stack, 60.0, center);
  CHECK(std::abs(axial_force(n52_projectile(), fs)) < 1e-9);
  CHECK(std::abs(axial_force(ferrite_projectile(), fs)) < 1e-9);
}

TEST_CASE("induced force is even in current, permanent force is odd") {
  const auto& stack = single_stack();
  const Projectile rod = ferrite_projectile();
  const Projectile slug = n52_projectile();
  for (double x : {-0.015, 0.02, 0.1, 0.21, 0.349}) {
    const FieldSample plus = superpose(stack, 50.0, x);
    const FieldSample minus = superpose(stack, -50.0, x);
    CHECK(axial_force(rod, plus) == axial_force(rod, minus));       // exact
    CHECK(axial_force(slug, plus) == -axial_force(slug, minus));    // exact
  }
}

TEST_CASE("force equals the negative energy gradient with frozen moment") {
  const auto& stack = single_stack();
  const double h = 1e-5;
  const Projectile models[] = {n52_projectile(), ferrite_projectile()};
  for (const auto& p : models) {
    for (int k = 0; k < 100; ++k) {
      const double x = -0.03 + 0.42 * k / 99.0;
      const FieldSample fs = superpose(stack, 50.0, x);
      const double moment = dipole_moment(p, fs.B);  // frozen at the sample point
      const double u_plus = -moment * superpose(stack, 50.0, x + h).B;
      const double u_minus = -moment * superpose(stack, 50.0, x - h).B;
      const double fd_force = -(u_plus - u_minus) / (2.0 * h);
      const double got = axial_force(p, fs);
      if (std::abs(fd_force) > 1e-12)
        CHECK(got == Approx(fd_force).epsilon(1e-4));
    }
  }
}

TEST_CASE("constant-current force on an inward-attracted magnet flips sign at center") {
  const auto& stack = single_stack();
  const double center = 0.5 * (stack.min_x() + stack.max_x());
  const Projectile slug = n52_projectile();
  const double current = 60.0;
  for (double d : {5e-3, 30e-3, 120e-3, 170e-3}) {
    CHECK(axial_force(slug, superpose(stack, current, center - d)) > 0.0);
    CHECK(axial_force(slug, superpose(stack, current, center + d)) < 0.0);
  }
  CHECK(std::abs(axial_force(slug, superpose(stack, current, center))) < 1e-9);
}

TEST_CASE("long pulse drags the rod past center and sucks it back") {
  const SimResult sim = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("F50"), ferrite_projectile(), 5e-3);
  REQUIRE(!sim.kinematics.empty());
  double v_peak = -1e300;
  std::size_t peak_at = 0;
  for (std::size_t i = 0; i < sim.kinematics.size(); ++i) {
    if (sim.kinematics[i].v > v_peak) {
      v_peak = sim.kinematics[i].v;
      peak_at = i;
    }
  }
  // the peak happens while current still flows, before the record ends
  REQUIRE(peak_at + 1 < sim.kinematics.size());
  CHECK(std::abs(sim.trace.samples[peak_at].i_coil) > 5.0);
  // strictly slower afterwards
  CHECK(sim.kinematics.back().v < v_peak - 1e-6);
  // and the peak sits past the coil center
  const auto& stack = single_stack();
  const double center = 0.5 * (stack.min_x() + stack.max_x());
  CHECK(sim.kinematics[peak_at].x >= center - 5e-3);
}

TEST_CASE("zero-moment projectile stalls with zero efficiency") {
  Projectile inert;
  inert.mass = 4e-3;
  inert.half_length = 5e-3;
  inert.model = InducedDipole{0.0, 0.0};
  const SimResult sim = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("F10"), inert, 5e-3);
  CHECK(sim.stalled);
  CHECK(sim.exit_velocity == 0.0);
  CHECK(sim.efficiency == 0.0);
  CHECK(sim.v_f < sim.v_i);  // the discharge still ran
}

TEST_CASE("kinetic energy never exceeds the capacitor drop") {
  const char* schedules[] = {"F10", "F36", "F15 B42 R12", "F10 B10 R10"};
  for (const char* text : schedules) {
    for (double x0 : {0.0, 8e-3, 20e-3}) {
      const SimResult sim = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                                   parse_schedule(text), n52_projectile(), x0);
      INFO(text << " x0=" << x0);
      CHECK(sim.energy.kinetic_exit <= sim.energy.cap_energy_drop);
      CHECK(sim.efficiency >= 0.0);
      CHECK(sim.efficiency < 1.0);
      const double audit_gap = std::abs(sim.energy.cap_energy_drop - sim.energy.dissipated -
                                        sim.energy.inductor_residual);
      CHECK(audit_gap <= 0.005 * sim.energy.cap_energy_drop);
    }
  }
}

TEST_CASE("efficiency quotient") {
  CHECK(efficiency(6.06e-3, 0.0, 0.12, 45.0, 37.36) == 0.0);
  // bench row: 11.76 m/s at 1.11% back-solves to a 37.36 V final voltage
  CHECK(efficiency(6.06e-3, 11.76, 0.12, 45.0, 37.36) == Approx(0.0111).epsilon(1e-3));
  CHECK(efficiency(2.0 * 6.06e-3, 11.76, 0.12, 45.0, 37.36) ==
        Approx(2.0 * efficiency(6.06e-3, 11.76, 0.12, 45.0, 37.36)).epsilon(1e-12));
  CHECK_THROWS_AS(efficiency(6.06e-3, 1.0, 0.12, 40.0, 45.0), Error);
  try {
    efficiency(6.06e-3, 1.0, 0.12, 40.0, 45.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Audit);
  }
}

TEST_CASE("halving the internal step leaves the exit velocity put") {
  const SimResult coarse = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                                  parse_schedule("F15 B42 R12"), n52_projectile(), 8e-3,
                                  SolverOptions{5e-6, 1e-3});
  const SimResult fine = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                                parse_schedule("F15 B42 R12"), n52_projectile(), 8e-3,
                                SolverOptions{2.5e-6, 1e-3});
  CHECK(coarse.exit_velocity == Approx(fine.exit_velocity).epsilon(1e-4));
}

TEST_CASE("induced trajectories ignore a global polarity flip") {
  const SimResult fwd = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("F10 B5 F10"), ferrite_projectile(), 5e-3);
  const SimResult rev = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("R10 B5 R10"), ferrite_projectile(), 5e-3);
  CHECK(fwd.exit_velocity == rev.exit_velocity);  // exact mirror
  CHECK(fwd.v_f == rev.v_f);
}

TEST_CASE("permanent trajectories feel a global polarity flip") {
  const SimResult fwd = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("F10"), n52_projectile(), 8e-3);
  const SimResult rev = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("R10"), n52_projectile(), 8e-3);
  CHECK(fwd.exit_velocity > 1.0);             // pulled in and launched
  CHECK(rev.exit_velocity < fwd.exit_velocity);  // pushed away instead
}

TEST_CASE("exit velocity carries the capacitor bookkeeping") {
  const SimResult sim = launch(single_stack(), TubeSpec{}, kCoil, kCap,
                               parse_schedule("F15 B42 R12"), n52_projectile(), 8e-3);
  CHECK(!sim.stalled);
  CHECK(sim.exit_velocity > 0.0);
  CHECK(sim.v_i == 45.0);
  CHECK(sim.v_f < sim.v_i);
  CHECK(sim.efficiency ==
        Approx(efficiency(6.06e-3, sim.exit_velocity, 0.12, sim.v_i, sim.v_f)).epsilon(1e-9));
  // kinematics and trace share the cadence
  REQUIRE(sim.kinematics.size() == sim.trace.samples.size());
  for (std::size_t i = 0; i < sim.kinematics.size(); ++i)
    CHECK(sim.kinematics[i].t == sim.trace.samples[i].t);
}

TEST_CASE("projectile validation") {
  Projectile bad;
  bad.mass = 0.0;
  bad.model = PermanentDipole{0.9};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.mass = 1e-3;
  bad.model = PermanentDipole{0.0};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.model = InducedDipole{-1.0, 0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
}
