#include <doctest.h>

#include <cmath>

#include "evobed/experiment.hpp"
#include "evobed/supervisor.hpp"
#include "support/test_gains.hpp"

using namespace evobed;

namespace {

SensedState hover_sensed(double h) {
  SensedState s;
  s.h = h;
  return s;
}

TrialRules default_rules() { return TrialRules{}; }

// Feeds a constant sensed state until the monitor fires or max ticks pass.
// Returns the tick of termination, -1 if none.
int ticks_until(TerminationMonitor& mon, const SensedState& s, double sp_yaw_deg,
                double amps, int max_ticks, TerminationReason expected) {
  for (int tick = 0; tick < max_ticks; ++tick) {
    auto r = mon.check(s, sp_yaw_deg, amps, tick / 250.0);
    if (r) {
      CHECK(*r == expected);
      return tick;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("sensor cadences hold between updates") {
  SensorSim sensors(SensorNoise::none(), Seed{1});
  VehicleState truth;
  truth.p_n = 0.5;
  truth.h = 0.3;
  SensedState first = sensors.sample(truth, 0);
  CHECK(first.position_updated);
  CHECK(first.height_updated);
  truth.p_n = 0.6;
  truth.h = 0.4;
  SensedState second = sensors.sample(truth, 1);
  CHECK_FALSE(second.position_updated);
  CHECK_FALSE(second.height_updated);
  CHECK(second.p_n == 0.5);  // zero-order hold
  CHECK(second.h == 0.3);
  int pos_updates = 1, h_updates = 1;
  for (int tick = 1; tick < 250; ++tick) {
    SensedState s = sensors.sample(truth, tick);
    pos_updates += s.position_updated ? 1 : 0;
    h_updates += s.height_updated ? 1 : 0;
  }
  CHECK(pos_updates == 60);
  CHECK(h_updates == 20);
}

TEST_CASE("stationary truth gives zero regression velocities") {
  SensorSim sensors(SensorNoise::none(), Seed{2});
  VehicleState truth;
  truth.p_n = 0.1;
  truth.h = 0.2;
  SensedState s;
  for (int tick = 0; tick < 300; ++tick) s = sensors.sample(truth, tick);
  CHECK(s.v_n == 0.0);
  CHECK(s.v_e == 0.0);
  CHECK(s.v_h == 0.0);
}

TEST_CASE("constant northward motion recovers the exact slope") {
  SensorSim sensors(SensorNoise::none(), Seed{3});
  VehicleState truth;
  SensedState s;
  for (int tick = 0; tick < 300; ++tick) {
    truth.p_n = 0.1 * (tick / 250.0);
    s = sensors.sample(truth, tick);
  }
  CHECK(s.v_n == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(s.v_e == 0.0);
}

TEST_CASE("velocities report zero until the regression window fills") {
  SensorSim sensors(SensorNoise::none(), Seed{4});
  VehicleState truth;
  // Height updates at ticks 0, 13, 25, 38, 50: four samples by tick 49.
  SensedState s;
  for (int tick = 0; tick < 49; ++tick) {
    truth.h = 0.2 + 0.1 * (tick / 250.0);
    s = sensors.sample(truth, tick);
  }
  CHECK(s.v_h == 0.0);
  for (int tick = 49; tick < 80; ++tick) {
    truth.h = 0.2 + 0.1 * (tick / 250.0);
    s = sensors.sample(truth, tick);
  }
  CHECK(s.v_h == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("current proxy is calibrated at hover and full throttle") {
  VehicleParams params;
  VehicleState s;
  double hover_thrust = params.mass * kGravity / kNumMotors;
  s.motor_thrust.fill(hover_thrust);
  CHECK(current_amps(s, params, 12.0, 60.0) == doctest::Approx(12.0).epsilon(1e-9));
  s.motor_thrust.fill(params.max_thrust_per_motor);
  CHECK(current_amps(s, params, 12.0, 60.0) == doctest::Approx(60.0).epsilon(1e-9));
  s.motor_thrust.fill(0.0);
  CHECK(current_amps(s, params, 12.0, 60.0) >= 0.0);
}

TEST_CASE("termination rules fire within one tick of the sensed crossing") {
  TetherConfig tether{0.22, 60.0, 160.0};

  SUBCASE("roll beyond 60 degrees") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.roll = deg_to_rad(60.1);
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::Tilt) == 0);
  }
  SUBCASE("pitch beyond 15 degrees") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.pitch = deg_to_rad(-15.1);
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::Tilt) == 0);
  }
  SUBCASE("yaw error sustained half a second") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.yaw = deg_to_rad(20.0);
    int tick = ticks_until(mon, s, 0.0, 12.0, 300, TerminationReason::Tilt);
    CHECK(tick == 125);  // fires once sustained for 0.5 s
  }
  SUBCASE("angular rate beyond 250 deg/s") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.q = deg_to_rad(250.5);
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::AngularRate) == 0);
  }
  SUBCASE("horizontal velocity beyond 0.5 m/s") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.v_n = 0.4;
    s.v_e = 0.4;  // hypot 0.57
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::HorizontalVelocity) == 0);
  }
  SUBCASE("vertical velocity beyond 0.25 m/s") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    s.v_h = -0.26;
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::VerticalVelocity) == 0);
  }
  SUBCASE("current beyond 20 A") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.1);
    CHECK(ticks_until(mon, s, 0.0, 20.1, 10, TerminationReason::Current) == 0);
  }
  SUBCASE("no takeoff within five seconds") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.0);
    int tick = ticks_until(mon, s, 0.0, 12.0, 2000, TerminationReason::NoTakeoff);
    CHECK(tick == 1250);  // t = 5.0 s
  }
  SUBCASE("tether pull above 18 cm on the short tether") {
    TerminationMonitor mon(default_rules(), tether);
    SensedState s = hover_sensed(0.181);
    CHECK(ticks_until(mon, s, 0.0, 12.0, 10, TerminationReason::TetherPull) == 0);
  }
}

TEST_CASE("flight-envelope rules stay disarmed while grounded") {
  TetherConfig tether{0.22, 60.0, 160.0};
  TerminationMonitor mon(default_rules(), tether);
  SensedState s = hover_sensed(0.0);
  s.yaw = deg_to_rad(100.0);  // large yaw error against a setpoint of 0
  for (int tick = 0; tick < 1000; ++tick)
    CHECK_FALSE(mon.check(s, 0.0, 12.0, tick / 250.0).has_value());
  CHECK_FALSE(mon.airborne());
}

TEST_CASE("pull rule can be disabled for the long tether") {
  TetherConfig tether{0.62, 60.0, 160.0};
  TrialRules rules;
  rules.tether_pull_enabled = false;
  TerminationMonitor mon(rules, tether);
  SensedState s = hover_sensed(0.4);
  for (int tick = 0; tick < 100; ++tick)
    CHECK_FALSE(mon.check(s, 0.0, 12.0, tick / 250.0).has_value());
}

TEST_CASE("yaw excursion winds up the tether") {
  TetherConfig tether{0.62, 60.0, 160.0};
  TrialRules rules;
  rules.tether_pull_enabled = false;
  TerminationMonitor mon(rules, tether);
  SensedState s = hover_sensed(0.2);
  // Rotate continuously; the unwrapped excursion crosses 160 degrees.
  std::optional<TerminationReason> fired;
  int tick = 0;
  for (; tick < 3000 && !fired; ++tick) {
    s.yaw = wrap_radians(deg_to_rad(0.2 * tick));
    fired = mon.check(s, rad_to_deg(s.yaw), 12.0, tick / 250.0);
  }
  REQUIRE(fired.has_value());
  CHECK(*fired == TerminationReason::TetherRadius);
  CHECK(std::abs(0.2 * (tick - 1) - 160.0) < 1.0);
}

TEST_CASE("zero gains never take off and keep only floor fitness") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet zeros;
  TrialOutcome o = run_trial(zeros, ctx, Seed{7});
  CHECK(o.reason == TerminationReason::NoTakeoff);
  CHECK(o.duration == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(o.fitness > 0.0);
  CHECK(o.fitness < 5.0 * kCycleRate * kMaxCycleFitness);
}

TEST_CASE("the known-good fixture completes the short-tether course") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  TrialOutcome o = run_trial(testsupport::known_good_gains(), ctx, Seed{11});
  CHECK(o.completed());
  CHECK(o.duration == 60.0);
  CHECK(o.fitness > 90000.0);
}

TEST_CASE("driving the height setpoint above the pull line terminates the trial") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  ctx.schedule.name = "pull-probe";
  ctx.schedule.entries = {{0.0, {0.0, 0.0, 0.25, 0.0}}};
  ctx.schedule.duration = 60.0;
  // A height tracker driven to 25 cm crosses the 18 cm pull line.
  GainSet g = testsupport::known_good_gains();
  g[Dof::Height] = {10.0, 4.0, 3.0};
  TrialOutcome o = run_trial(g, ctx, Seed{13});
  CHECK(o.reason == TerminationReason::TetherPull);
  CHECK(o.duration < 60.0);
}

TEST_CASE("trials are bit-identical for identical seeds") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet g = testsupport::known_good_gains();
  TrialOutcome a = run_trial(g, ctx, Seed{17});
  TrialOutcome b = run_trial(g, ctx, Seed{17});
  CHECK(a.fitness == b.fitness);
  CHECK(a.duration == b.duration);
  CHECK(a.reason == b.reason);
  TrialOutcome c = run_trial(g, ctx, Seed{18});
  CHECK(a.fitness != c.fitness);
}

TEST_CASE("terminated trials keep the fitness accumulated so far") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  TrialOutcome o = run_trial(testsupport::oscillatory_gains(), ctx, Seed{19});
  CHECK_FALSE(o.completed());
  CHECK(o.fitness < 0.5 * kMaxTrialFitness);
  CHECK(o.fitness <= o.duration * kCycleRate * kMaxCycleFitness + kMaxCycleFitness);
}

TEST_CASE("evaluation protocol stops at the first failure") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet zeros;
  EvalResult r = evaluate(zeros, ctx, Seed{23});
  CHECK(r.trials_run == 1);
  CHECK_FALSE(r.success);
  CHECK(r.fitness == r.outcomes[0].fitness);
}

TEST_CASE("evaluation protocol averages three successful runs") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  EvalResult r = evaluate(testsupport::known_good_gains(), ctx, Seed{29});
  CHECK(r.trials_run == 3);
  CHECK(r.success);
  double mean =
      (r.outcomes[0].fitness + r.outcomes[1].fitness + r.outcomes[2].fitness) / 3.0;
  CHECK(r.fitness == doctest::Approx(mean).epsilon(1e-12));
  // Distinct wind phases: the three totals differ.
  CHECK(r.outcomes[0].fitness != r.outcomes[1].fitness);
  CHECK(r.outcomes[1].fitness != r.outcomes[2].fitness);
}

TEST_CASE("bootstrap viability rejects zero gains and accepts the fixture") {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet zeros;
  CHECK_FALSE(bootstrap_viable(zeros, ctx, Seed{31}));
  CHECK(bootstrap_viable(testsupport::known_good_gains(), ctx, Seed{31}));
}

TEST_CASE("termination reasons round-trip through strings") {
  for (int i = 0; i <= static_cast<int>(TerminationReason::TetherRadius); ++i) {
    auto r = static_cast<TerminationReason>(i);
    CHECK(termination_reason_from_string(to_string(r)) == r);
  }
  CHECK_THROWS_AS(termination_reason_from_string("bogus"), std::invalid_argument);
}
