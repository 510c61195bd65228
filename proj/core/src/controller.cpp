#include "evobed/controller.hpp"

#include <algorithm>
#include <cmath>

namespace evobed {

namespace {

constexpr double kTiltPerCmdDeg = kAttitudeErrorLimitDeg / kPositionCmdLimit;  // deg per cm

double clamp_sym(double v, double limit) { return std::clamp(v, -limit, limit); }

// Motor mixing factors for the plus-layout hexacopter; must agree with the
// geometry in dynamics.cpp. Positive roll command tilts toward body-left,
// positive pitch toward body-forward.
struct MixTable {
  std::array<double, kNumMotors> roll, pitch, yaw;
  MixTable() {
    for (int i = 0; i < kNumMotors; ++i) {
      double a = deg_to_rad(60.0 * i);
      roll[i] = std::sin(a);
      pitch[i] = -std::cos(a);
      yaw[i] = (i % 2 == 0) ? 1.0 : -1.0;
    }
  }
};

const MixTable& mix_table() {
  static const MixTable t;
  return t;
}

}  // namespace

std::array<double, 18> GainSet::to_array() const {
  std::array<double, 18> a{};
  for (int d = 0; d < kNumDofs; ++d) {
    a[3 * d] = dof[d].kp;
    a[3 * d + 1] = dof[d].ki;
    a[3 * d + 2] = dof[d].kd;
  }
  return a;
}

GainSet GainSet::from_array(const std::array<double, 18>& a) {
  GainSet g;
  for (int d = 0; d < kNumDofs; ++d) {
    g.dof[d].kp = a[3 * d];
    g.dof[d].ki = a[3 * d + 1];
    g.dof[d].kd = a[3 * d + 2];
  }
  return g;
}

bool GainSet::finite() const {
  for (const auto& g : dof)
    if (!std::isfinite(g.kp) || !std::isfinite(g.ki) || !std::isfinite(g.kd))
      return false;
  return true;
}

double gain_init_upper(Dof d) {
  switch (d) {
    case Dof::Roll:
    case Dof::Pitch:
    case Dof::Yaw:
      return kDeltaLimit / kAttitudeErrorLimitDeg;  // 20
    case Dof::Height:
      return kDeltaLimit / (kHeightErrorLimit * 100.0);  // 30
    case Dof::North:
    case Dof::East:
      return kPositionCmdLimit / (kPositionErrorLimit * 100.0);  // 4/3
  }
  return 0.0;
}

GainSet clamp_to_sanity(const GainSet& g) {
  GainSet out = g;
  for (int d = 0; d < kNumDofs; ++d) {
    double bound = kGainSlackFactor * gain_init_upper(static_cast<Dof>(d));
    out.dof[d].kp = clamp_sym(out.dof[d].kp, bound);
    out.dof[d].ki = clamp_sym(out.dof[d].ki, bound);
    out.dof[d].kd = clamp_sym(out.dof[d].kd, bound);
  }
  return out;
}

void ControllerState::reset() { *this = ControllerState{}; }

double ControllerState::Channel::update(double error, const Gains3& g, double dt,
                                        double output_limit, bool fresh) {
  integral += error * dt;
  if (std::abs(g.ki) > 1e-12) {
    double bound = output_limit / std::abs(g.ki);
    integral = clamp_sym(integral, bound);
  } else {
    integral = clamp_sym(integral, 1e9);
  }
  deriv_dt += dt;
  if (fresh) {
    derivative = has_prev ? (error - prev_error) / deriv_dt : 0.0;
    prev_error = error;
    has_prev = true;
    deriv_dt = 0.0;
  }
  return g.kp * error + g.ki * integral + g.kd * derivative;
}

ErrorSet compute_errors(const SensedState& estimate, const Waypoint& setpoint,
                        const ControllerState& state) {
  ErrorSet e;
  e.position_fresh = estimate.position_updated;
  e.height_fresh = estimate.height_updated;
  e.height_m = clamp_sym(setpoint.height - estimate.h, kHeightErrorLimit);
  e.yaw_deg = clamp_sym(wrap_degrees(setpoint.yaw_deg - rad_to_deg(estimate.yaw)),
                        kAttitudeErrorLimitDeg);
  e.roll_deg = clamp_sym(state.roll_sp_deg_ - rad_to_deg(estimate.roll),
                         kAttitudeErrorLimitDeg);
  e.pitch_deg = clamp_sym(state.pitch_sp_deg_ - rad_to_deg(estimate.pitch),
                          kAttitudeErrorLimitDeg);
  e.north_m = clamp_sym(setpoint.north - estimate.p_n, kPositionErrorLimit);
  e.east_m = clamp_sym(setpoint.east - estimate.p_e, kPositionErrorLimit);
  return e;
}

DeltaCommands pid_step(const ErrorSet& errors, const GainSet& gains,
                       ControllerState& state, double dt, bool outer_update,
                       double sensed_yaw_rad, bool airborne) {
  if (!airborne) {
    state.roll_.integral = 0.0;
    state.pitch_.integral = 0.0;
    state.yaw_.integral = 0.0;
    state.north_.integral = 0.0;
    state.east_.integral = 0.0;
  }
  state.outer_dt_accum_ += dt;
  if (outer_update) {
    double outer_dt = state.outer_dt_accum_;
    state.outer_dt_accum_ = 0.0;
    // World-frame position PIDs in centimetres of command.
    double cmd_n = state.north_.update(errors.north_m * 100.0, gains[Dof::North],
                                       outer_dt, kPositionCmdLimit);
    double cmd_e = state.east_.update(errors.east_m * 100.0, gains[Dof::East],
                                      outer_dt, kPositionCmdLimit);
    cmd_n = clamp_sym(cmd_n, kPositionCmdLimit);
    cmd_e = clamp_sym(cmd_e, kPositionCmdLimit);
    // Rotate the command into the heading frame and map onto tilt setpoints.
    double cy = std::cos(sensed_yaw_rad), sy = std::sin(sensed_yaw_rad);
    double cmd_fwd = cy * cmd_n + sy * cmd_e;
    double cmd_right = -sy * cmd_n + cy * cmd_e;
    // Positive pitch tilts thrust forward; positive roll tilts left, hence
    // the sign on the rightward command.
    state.pitch_sp_target_deg_ =
        clamp_sym(cmd_fwd * kTiltPerCmdDeg, kAttitudeErrorLimitDeg);
    state.roll_sp_target_deg_ =
        clamp_sym(-cmd_right * kTiltPerCmdDeg, kAttitudeErrorLimitDeg);
  }
  double max_slew = kTiltSlewDps * dt;
  state.roll_sp_deg_ +=
      clamp_sym(state.roll_sp_target_deg_ - state.roll_sp_deg_, max_slew);
  state.pitch_sp_deg_ +=
      clamp_sym(state.pitch_sp_target_deg_ - state.pitch_sp_deg_, max_slew);

  DeltaCommands out;
  double raw_roll = state.roll_.update(errors.roll_deg, gains[Dof::Roll], dt, kDeltaLimit);
  double raw_pitch = state.pitch_.update(errors.pitch_deg, gains[Dof::Pitch], dt, kDeltaLimit);
  double raw_yaw = state.yaw_.update(errors.yaw_deg, gains[Dof::Yaw], dt, kDeltaLimit);
  double raw_thrust = state.height_.update(errors.height_m * 100.0, gains[Dof::Height],
                                           dt, kDeltaLimit, errors.height_fresh);

  out.roll = clamp_sym(raw_roll, kDeltaLimit);
  out.pitch = clamp_sym(raw_pitch, kDeltaLimit);
  out.yaw = clamp_sym(raw_yaw, kDeltaLimit);
  out.thrust = clamp_sym(raw_thrust, kDeltaLimit);
  out.saturated[0] = std::abs(raw_roll) >= kDeltaLimit;
  out.saturated[1] = std::abs(raw_pitch) >= kDeltaLimit;
  out.saturated[2] = std::abs(raw_yaw) >= kDeltaLimit;
  out.saturated[3] = std::abs(raw_thrust) >= kDeltaLimit;
  return out;
}

MixResult mix(const DeltaCommands& delta, double base_pwm) {
  const auto& t = mix_table();
  MixResult r;
  for (int i = 0; i < kNumMotors; ++i) {
    double u = base_pwm + delta.thrust + t.roll[i] * delta.roll +
               t.pitch[i] * delta.pitch + t.yaw[i] * delta.yaw;
    r.clamped[i] = u < kPwmMin || u > kPwmMax;
    r.pwm[i] = std::clamp(u, kPwmMin, kPwmMax);
  }
  return r;
}

Waypoint rate_limit_setpoint(const Waypoint& current, const Waypoint& target, double dt) {
  auto toward = [](double cur, double tgt, double max_step) {
    double diff = tgt - cur;
    return cur + clamp_sym(diff, max_step);
  };
  Waypoint out;
  out.north = toward(current.north, target.north, kPositionRateLimit * dt);
  out.east = toward(current.east, target.east, kPositionRateLimit * dt);
  out.height = toward(current.height, target.height, kHeightRateLimit * dt);
  double yaw_diff = wrap_degrees(target.yaw_deg - current.yaw_deg);
  out.yaw_deg = current.yaw_deg + clamp_sym(yaw_diff, kYawRateLimitDps * dt);
  if (std::abs(wrap_degrees(target.yaw_deg - out.yaw_deg)) < 1e-12)
    out.yaw_deg = target.yaw_deg;
  return out;
}

}  // namespace evobed
