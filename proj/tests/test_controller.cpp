#include <doctest.h>

#include <cmath>

#include "evobed/controller.hpp"

using namespace evobed;

TEST_CASE("initialisation envelope bounds") {
  CHECK(gain_init_upper(Dof::Roll) == 20.0);
  CHECK(gain_init_upper(Dof::Pitch) == 20.0);
  CHECK(gain_init_upper(Dof::Yaw) == 20.0);
  CHECK(gain_init_upper(Dof::Height) == 30.0);
  CHECK(gain_init_upper(Dof::North) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(gain_init_upper(Dof::East) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gain serialisation order round-trips") {
  GainSet g;
  for (int d = 0; d < kNumDofs; ++d) {
    g.dof[d].kp = d * 3 + 1;
    g.dof[d].ki = d * 3 + 2;
    g.dof[d].kd = d * 3 + 3;
  }
  auto a = g.to_array();
  CHECK(a[0] == 1.0);   // roll P
  CHECK(a[1] == 2.0);   // roll I
  CHECK(a[3] == 4.0);   // pitch P
  CHECK(a[17] == 18.0); // east D
  GainSet back = GainSet::from_array(a);
  CHECK(back.to_array() == a);
}

TEST_CASE("sanity clamp bounds gains at four envelopes") {
  GainSet g;
  g[Dof::Height].ki = 1e6;
  g[Dof::Roll].kp = -1e6;
  GainSet c = clamp_to_sanity(g);
  CHECK(c[Dof::Height].ki == 120.0);
  CHECK(c[Dof::Roll].kp == -80.0);
}

TEST_CASE("errors vanish when the estimate matches the setpoint") {
  SensedState est;
  est.yaw = deg_to_rad(25.0);
  Waypoint sp{0.0, 0.0, 0.0, 25.0};
  ControllerState state;
  ErrorSet e = compute_errors(est, sp, state);
  CHECK(e.height_m == 0.0);
  CHECK(std::abs(e.yaw_deg) < 1e-12);
  CHECK(e.roll_deg == 0.0);
  CHECK(e.pitch_deg == 0.0);
  CHECK(e.north_m == 0.0);
  CHECK(e.east_m == 0.0);
}

TEST_CASE("height error saturates at 10 cm") {
  SensedState est;
  Waypoint sp{0.0, 0.0, 0.25, 0.0};
  ControllerState state;
  ErrorSet e = compute_errors(est, sp, state);
  CHECK(e.height_m == 0.10);
}

TEST_CASE("yaw error wraps before limiting") {
  SensedState est;
  est.yaw = deg_to_rad(-170.0);
  Waypoint sp{0.0, 0.0, 0.0, 170.0};
  ControllerState state;
  ErrorSet e = compute_errors(est, sp, state);
  // Raw difference 340 degrees wraps to -20, then saturates at the 15
  // degree attitude limit.
  CHECK(wrap_degrees(340.0) == doctest::Approx(-20.0).epsilon(1e-9));
  CHECK(e.yaw_deg == doctest::Approx(-15.0).epsilon(1e-9));
}

TEST_CASE("position error limited per axis") {
  SensedState est;
  est.p_n = -0.5;
  est.p_e = 0.04;
  Waypoint sp{0.0, 0.0, 0.0, 0.0};
  ControllerState state;
  ErrorSet e = compute_errors(est, sp, state);
  CHECK(e.north_m == 0.15);
  CHECK(e.east_m == doctest::Approx(-0.04).epsilon(1e-12));
}

TEST_CASE("zero errors and zero integrators produce zero commands") {
  GainSet g;
  for (auto& d : g.dof) d = {5.0, 3.0, 1.0};
  ControllerState state;
  ErrorSet e;
  DeltaCommands out = pid_step(e, g, state, 0.004, true, 0.0);
  CHECK(out.roll == 0.0);
  CHECK(out.pitch == 0.0);
  CHECK(out.yaw == 0.0);
  CHECK(out.thrust == 0.0);
  CHECK(out.saturated_count() == 0);
}

TEST_CASE("proportional-only controller jumps to Kp times the error") {
  GainSet g;
  g[Dof::Roll].kp = 4.0;
  ControllerState state;
  ErrorSet e;
  e.roll_deg = 5.0;
  DeltaCommands out = pid_step(e, g, state, 0.004, false, 0.0);
  CHECK(out.roll == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("integral-only height response follows Ki * e * t until saturation") {
  GainSet g;
  g[Dof::Height].ki = 1.0;  // PWM per cm
  ControllerState state;
  ErrorSet e;
  e.height_m = 0.05;  // 5 cm
  double dt = 0.004;
  DeltaCommands out;
  for (int i = 0; i < 1000; ++i) out = pid_step(e, g, state, dt, false, 0.0);
  // Closed form: Ki * e_cm * t = 1 * 5 * 4 s = 20.
  CHECK(out.thrust == doctest::Approx(20.0).epsilon(1e-9));

  // Push to saturation: at 5 cm error the rise is 5 PWM/s, so drive longer.
  for (int i = 0; i < 20000; ++i) out = pid_step(e, g, state, dt, false, 0.0);
  CHECK(out.thrust == kDeltaLimit);
  CHECK(out.saturated[3]);
}

TEST_CASE("anti-windup keeps the integrator responsive after saturation") {
  GainSet g;
  g[Dof::Height].ki = 30.0;
  ControllerState state;
  ErrorSet e;
  e.height_m = 0.10;
  double dt = 0.004;
  DeltaCommands out;
  for (int i = 0; i < 500; ++i) out = pid_step(e, g, state, dt, false, 0.0);
  CHECK(out.thrust == kDeltaLimit);
  // Error sign reversal must show in the output within one tick.
  e.height_m = -0.10;
  out = pid_step(e, g, state, dt, false, 0.0);
  CHECK(out.thrust < kDeltaLimit);
}

TEST_CASE("pid output is linear in the error below saturation") {
  GainSet g;
  g[Dof::Yaw] = {3.0, 2.0, 0.5};
  ErrorSet e1, e2;
  e1.yaw_deg = 2.0;
  e2.yaw_deg = 4.0;
  ControllerState s1, s2;
  DeltaCommands a = pid_step(e1, g, s1, 0.004, false, 0.0);
  DeltaCommands b = pid_step(e2, g, s2, 0.004, false, 0.0);
  CHECK(b.yaw == doctest::Approx(2.0 * a.yaw).epsilon(1e-12));
}

TEST_CASE("outer loop produces tilt setpoints inside the attitude limit") {
  GainSet g;
  g[Dof::North].kp = 4.0 / 3.0;
  g[Dof::East].kp = 4.0 / 3.0;
  ControllerState state;
  ErrorSet e;
  e.north_m = 0.15;
  e.east_m = 0.0;
  pid_step(e, g, state, 0.004, true, 0.0);
  // 15 cm error * 4/3 = 20 cm command -> full 15 degree tilt setpoint.
  CHECK(state.pitch_setpoint_deg() == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(state.roll_setpoint_deg() == doctest::Approx(0.0).epsilon(1e-9));

  // Heading east: the same world-north error maps onto a leftward tilt.
  ControllerState state2;
  pid_step(e, g, state2, 0.004, true, deg_to_rad(90.0));
  CHECK(state2.pitch_setpoint_deg() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(state2.roll_setpoint_deg() == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("outer loop holds setpoints between updates") {
  GainSet g;
  g[Dof::North].kp = 1.0;
  ControllerState state;
  ErrorSet e;
  e.north_m = 0.10;
  pid_step(e, g, state, 0.004, true, 0.0);
  double held = state.pitch_setpoint_deg();
  CHECK(held > 0.0);
  e.north_m = 0.0;
  pid_step(e, g, state, 0.004, false, 0.0);
  CHECK(state.pitch_setpoint_deg() == held);
}

TEST_CASE("mixer passes the base through at zero commands") {
  MixResult r = mix(DeltaCommands{}, kPwmMin);
  for (double u : r.pwm) CHECK(u == kPwmMin);
  for (bool c : r.clamped) CHECK_FALSE(c);
}

TEST_CASE("yaw command moves spin groups in opposite directions") {
  DeltaCommands d;
  d.yaw = 60.0;
  MixResult r = mix(d, 1400.0);
  for (int i = 0; i < kNumMotors; ++i) {
    double delta = r.pwm[i] - 1400.0;
    CHECK(std::abs(delta) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(delta == ((i % 2 == 0) ? 60.0 : -60.0));
  }
}

TEST_CASE("large thrust command clamps every motor at the ceiling") {
  DeltaCommands d;
  d.thrust = 1000.0;
  MixResult r = mix(d, kPwmMin);
  for (int i = 0; i < kNumMotors; ++i) {
    CHECK(r.pwm[i] == kPwmMax);
    CHECK(r.clamped[i]);
  }
}

TEST_CASE("motor commands never leave the PWM range") {
  Rng rng(Seed{11}.value);
  for (int i = 0; i < 2000; ++i) {
    DeltaCommands d;
    d.roll = rng.uniform(-600.0, 600.0);
    d.pitch = rng.uniform(-600.0, 600.0);
    d.yaw = rng.uniform(-600.0, 600.0);
    d.thrust = rng.uniform(-600.0, 600.0);
    MixResult r = mix(d, rng.uniform(kPwmMin, kPwmMax));
    for (double u : r.pwm) {
      CHECK(u >= kPwmMin);
      CHECK(u <= kPwmMax);
    }
  }
}

TEST_CASE("rate limiter leaves a reached setpoint unchanged") {
  Waypoint w{0.1, -0.1, 0.3, 40.0};
  Waypoint out = rate_limit_setpoint(w, w, 0.004);
  CHECK(out.north == w.north);
  CHECK(out.east == w.east);
  CHECK(out.height == w.height);
  CHECK(out.yaw_deg == w.yaw_deg);
}

TEST_CASE("height ramp 0.2 to 0.4 m completes in exactly one second") {
  Waypoint current{0.0, 0.0, 0.2, 0.0};
  Waypoint target{0.0, 0.0, 0.4, 0.0};
  double dt = 0.004;
  int ticks = 0;
  while (current.height != target.height) {
    current = rate_limit_setpoint(current, target, dt);
    ++ticks;
    REQUIRE(ticks < 300);
  }
  CHECK(ticks == 250);  // 1.0 s at 250 Hz
}

TEST_CASE("yaw ramp 40 to 85 degrees completes in 1.5 seconds") {
  Waypoint current{0.0, 0.0, 0.2, 40.0};
  Waypoint target{0.0, 0.0, 0.2, 85.0};
  double dt = 0.004;
  int ticks = 0;
  while (current.yaw_deg != target.yaw_deg) {
    current = rate_limit_setpoint(current, target, dt);
    ++ticks;
    REQUIRE(ticks < 500);
  }
  CHECK(ticks == 375);  // 1.5 s at 250 Hz
}

TEST_CASE("yaw takes the shortest wrapped path") {
  Waypoint current{0.0, 0.0, 0.2, 170.0};
  Waypoint target{0.0, 0.0, 0.2, -170.0};
  Waypoint next = rate_limit_setpoint(current, target, 0.004);
  CHECK(next.yaw_deg > 170.0);  // rotates through 180, not back through 0
}

TEST_CASE("per-tick setpoint motion respects every rate limit") {
  Rng rng(Seed{3}.value);
  double dt = 0.004;
  for (int i = 0; i < 500; ++i) {
    Waypoint current{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                     rng.uniform(0.0, 0.5), rng.uniform(-180.0, 180.0)};
    Waypoint target{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                    rng.uniform(0.0, 0.5), rng.uniform(-180.0, 180.0)};
    Waypoint next = rate_limit_setpoint(current, target, dt);
    CHECK(std::abs(next.north - current.north) <= kPositionRateLimit * dt + 1e-12);
    CHECK(std::abs(next.east - current.east) <= kPositionRateLimit * dt + 1e-12);
    CHECK(std::abs(next.height - current.height) <= kHeightRateLimit * dt + 1e-12);
    CHECK(std::abs(wrap_degrees(next.yaw_deg - current.yaw_deg)) <=
          kYawRateLimitDps * dt + 1e-12);
  }
}
