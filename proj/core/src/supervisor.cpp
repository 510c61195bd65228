#include "evobed/supervisor.hpp"

#include <algorithm>
#include <cmath>

namespace evobed {

namespace {

constexpr double kDt = 1.0 / kCycleRate;

// Seed stream tags within one trial.
constexpr std::uint64_t kTagReset = 1;
constexpr std::uint64_t kTagWindPhase = 2;
constexpr std::uint64_t kTagSensors = 3;
constexpr std::uint64_t kTagWindNoise = 4;
constexpr std::uint64_t kTagDivergedRetry = 90;

struct ProbeSpec {
  double hover_height = 0.1;  // m
  double hold_s = 0.2;
  double max_seconds = 8.0;
};

TrialOutcome run_trial_once(const GainSet& gains, const TrialContext& ctx, Seed seed,
                            bool capture_series, const ProbeSpec* probe,
                            bool* probe_passed) {
  if (!gains.finite()) throw std::invalid_argument("gain set must be finite");

  VehicleState truth;
  {
    Rng reset_rng = seed.child(kTagReset).rng();
    truth.yaw = deg_to_rad(reset_rng.uniform(-60.0, 60.0));
  }
  WindField wind = ctx.wind;
  {
    Rng phase_rng = seed.child(kTagWindPhase).rng();
    wind.phase = phase_rng.uniform(0.0, 2.0 * kPi);
  }
  Seed wind_noise = seed.child(kTagWindNoise);
  SensorSim sensors(ctx.noise, seed.child(kTagSensors));
  TerminationMonitor monitor(ctx.rules, ctx.tether);
  ControllerState cstate;

  double duration = probe ? probe->max_seconds : ctx.schedule.duration;
  int n_ticks = static_cast<int>(std::lround(duration * kCycleRate));

  TrialOutcome outcome;
  outcome.seed = seed.value;
  double total = 0.0;
  Waypoint setpoint;
  Waypoint probe_target;
  double airborne_since = -1.0;

  for (int tick = 0; tick < n_ticks; ++tick) {
    double t = tick * kDt;
    SensedState sensed = sensors.sample(truth, tick);
    if (tick == 0) {
      setpoint = Waypoint{0.0, 0.0, 0.0, rad_to_deg(sensed.yaw)};
      probe_target = probe ? Waypoint{0.0, 0.0, probe->hover_height, setpoint.yaw_deg}
                           : Waypoint{};
    }

    double amps = current_amps(truth, ctx.vehicle, ctx.rules.hover_current_amps,
                               ctx.rules.max_current_amps);
    if (auto reason = monitor.check(sensed, setpoint.yaw_deg, amps, t)) {
      outcome.reason = *reason;
      outcome.duration = t;
      outcome.fitness = total;
      return outcome;
    }

    if (probe) {
      if (sensed.h > ctx.rules.takeoff_height) {
        if (airborne_since < 0.0) airborne_since = t;
        if (t - airborne_since >= probe->hold_s) {
          *probe_passed = true;
          outcome.reason = TerminationReason::Completed;
          outcome.duration = t;
          outcome.fitness = total;
          return outcome;
        }
      } else {
        airborne_since = -1.0;
      }
    }

    const Waypoint& target = probe ? probe_target : ctx.schedule.active(t);
    setpoint = rate_limit_setpoint(setpoint, target, kDt);

    ErrorSet errors = compute_errors(sensed, setpoint, cstate);
    DeltaCommands delta = pid_step(errors, gains, cstate, kDt, sensed.position_updated,
                                   sensed.yaw, monitor.airborne());
    MixResult mixed = mix(delta, kPwmMin);

    FitnessBreakdown b =
        cycle_fitness(sensed, setpoint, cstate.roll_setpoint_deg(),
                      cstate.pitch_setpoint_deg(), delta.saturated_count(), ctx.limits);
    total = accumulate_fitness(total, b);
    if (capture_series) outcome.series.push_back({t, b, total});

    Vec3 wind_vec = wind_at(t, wind, wind_noise);
    truth = step(truth, mixed.pwm, wind_vec, ctx.vehicle, kDt, &ctx.tether);
  }

  outcome.reason = TerminationReason::Completed;
  outcome.duration = duration;
  outcome.fitness = total;
  return outcome;
}

TrialOutcome run_trial_retrying(const GainSet& gains, const TrialContext& ctx, Seed seed,
                                bool capture_series, const ProbeSpec* probe,
                                bool* probe_passed) {
  Seed attempt_seed = seed;
  for (int attempt = 0;; ++attempt) {
    try {
      return run_trial_once(gains, ctx, attempt_seed, capture_series, probe,
                            probe_passed);
    } catch (const SimulationDiverged&) {
      if (attempt >= 8) throw;
      // Mirrors the hardware practice of re-running erroneous trials.
      attempt_seed = seed.child(kTagDivergedRetry + attempt);
    }
  }
}

}  // namespace

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Completed: return "completed";
    case TerminationReason::Tilt: return "tilt";
    case TerminationReason::AngularRate: return "angular-rate";
    case TerminationReason::HorizontalVelocity: return "horiz-velocity";
    case TerminationReason::VerticalVelocity: return "vert-velocity";
    case TerminationReason::Current: return "current";
    case TerminationReason::NoTakeoff: return "no-takeoff";
    case TerminationReason::TetherPull: return "tether-pull";
    case TerminationReason::TetherRadius: return "tether-radius";
  }
  return "unknown";
}

TerminationReason termination_reason_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(TerminationReason::TetherRadius); ++i) {
    auto r = static_cast<TerminationReason>(i);
    if (s == to_string(r)) return r;
  }
  throw std::invalid_argument("unknown termination reason: " + s);
}

double current_amps(const VehicleState& state, const VehicleParams& params,
                    double hover_amps, double max_amps) {
  double thrust = 0.0;
  for (double f : state.motor_thrust) thrust += f;
  double throttle = thrust / (kNumMotors * params.max_thrust_per_motor);
  double hover_throttle =
      params.mass * kGravity / (kNumMotors * params.max_thrust_per_motor);
  double amps = hover_amps +
                (max_amps - hover_amps) * (throttle - hover_throttle) /
                    (1.0 - hover_throttle);
  return std::max(amps, 0.0);
}

TerminationMonitor::TerminationMonitor(const TrialRules& rules, const TetherConfig& tether)
    : rules_(rules), tether_(tether) {}

std::optional<TerminationReason> TerminationMonitor::check(const SensedState& sensed,
                                                           double setpoint_yaw_deg,
                                                           double amps, double t) {
  if (have_prev_yaw_) yaw_excursion_ += wrap_radians(sensed.yaw - prev_yaw_);
  prev_yaw_ = sensed.yaw;
  have_prev_yaw_ = true;

  if (!airborne_ && sensed.h > rules_.takeoff_height) airborne_ = true;

  if (amps > rules_.current_limit_amps) return TerminationReason::Current;
  if (!airborne_) {
    if (t >= rules_.takeoff_window_s) return TerminationReason::NoTakeoff;
    return std::nullopt;
  }

  if (rules_.tether_pull_enabled && sensed.h > rules_.tether_pull_height)
    return TerminationReason::TetherPull;
  if (std::abs(rad_to_deg(sensed.roll)) > rules_.roll_limit_deg)
    return TerminationReason::Tilt;
  if (std::abs(rad_to_deg(sensed.pitch)) > rules_.pitch_limit_deg)
    return TerminationReason::Tilt;

  double yaw_err = std::abs(wrap_degrees(setpoint_yaw_deg - rad_to_deg(sensed.yaw)));
  if (yaw_err > rules_.yaw_error_limit_deg) {
    if (yaw_err_since_ < 0.0) yaw_err_since_ = t;
    if (t - yaw_err_since_ >= rules_.yaw_error_hold_s) return TerminationReason::Tilt;
  } else {
    yaw_err_since_ = -1.0;
  }

  double rate_limit = deg_to_rad(rules_.rate_limit_dps);
  if (std::abs(sensed.p) > rate_limit || std::abs(sensed.q) > rate_limit ||
      std::abs(sensed.r) > rate_limit)
    return TerminationReason::AngularRate;

  if (std::hypot(sensed.v_n, sensed.v_e) > rules_.horizontal_velocity_limit)
    return TerminationReason::HorizontalVelocity;
  if (std::abs(sensed.v_h) > rules_.vertical_velocity_limit)
    return TerminationReason::VerticalVelocity;

  if (std::abs(rad_to_deg(yaw_excursion_)) > tether_.yaw_excursion_deg)
    return TerminationReason::TetherRadius;

  return std::nullopt;
}

TrialOutcome run_trial(const GainSet& gains, const TrialContext& ctx, Seed seed,
                       bool capture_series) {
  ctx.schedule.validate();
  return run_trial_retrying(gains, ctx, seed, capture_series, nullptr, nullptr);
}

EvalResult evaluate(const GainSet& gains, const TrialContext& ctx, Seed seed) {
  EvalResult result;
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    TrialOutcome o = run_trial(gains, ctx, seed.child(k));
    sum += o.fitness;
    result.outcomes.push_back(std::move(o));
    result.trials_run = k + 1;
    if (!result.outcomes.back().completed()) {
      result.fitness = sum / result.trials_run;
      result.success = false;
      return result;
    }
  }
  result.fitness = sum / 3.0;
  result.success = true;
  return result;
}

bool bootstrap_viable(const GainSet& gains, const TrialContext& ctx, Seed seed) {
  ProbeSpec probe;
  bool passed = false;
  run_trial_retrying(gains, ctx, seed, false, &probe, &passed);
  return passed;
}

}  // namespace evobed
