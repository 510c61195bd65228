#include "evobed/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace evobed {

namespace {

constexpr double kSubstep = 0.001;  // 1 kHz physics

// Hexacopter "plus" layout: motor i at arm angle 60*i degrees from north,
// alternating spin direction. Spin +1 contributes positive yaw torque.
struct MotorGeometry {
  std::array<double, kNumMotors> cos_a;
  std::array<double, kNumMotors> sin_a;
  std::array<double, kNumMotors> spin;

  MotorGeometry() {
    for (int i = 0; i < kNumMotors; ++i) {
      double a = deg_to_rad(60.0 * i);
      cos_a[i] = std::cos(a);
      sin_a[i] = std::sin(a);
      spin[i] = (i % 2 == 0) ? 1.0 : -1.0;
    }
  }
};

const MotorGeometry& geometry() {
  static const MotorGeometry g;
  return g;
}

bool all_finite(const VehicleState& s) {
  bool ok = std::isfinite(s.p_n) && std::isfinite(s.p_e) && std::isfinite(s.h) &&
            std::isfinite(s.v_n) && std::isfinite(s.v_e) && std::isfinite(s.v_h) &&
            std::isfinite(s.roll) && std::isfinite(s.pitch) && std::isfinite(s.yaw) &&
            std::isfinite(s.p) && std::isfinite(s.q) && std::isfinite(s.r);
  for (int i = 0; i < kNumMotors; ++i)
    ok = ok && std::isfinite(s.motor_pwm[i]) && std::isfinite(s.motor_thrust[i]);
  return ok;
}

// Direction the body z axis points in world coordinates.
Vec3 body_up(double roll, double pitch, double yaw) {
  double cr = std::cos(roll), sr = std::sin(roll);
  double cp = std::cos(pitch), sp = std::sin(pitch);
  double cy = std::cos(yaw), sy = std::sin(yaw);
  return {cy * sp * cr + sy * sr, sy * sp * cr - cy * sr, cp * cr};
}

void clamp_to_tether_sphere(VehicleState& s, const TetherConfig& tether) {
  Vec3 pos{s.p_n, s.p_e, s.h};
  double d = pos.norm();
  if (d <= tether.radius || d == 0.0) return;
  double scale = tether.radius / d;
  s.p_n *= scale;
  s.p_e *= scale;
  s.h *= scale;
  Vec3 unit = pos * (1.0 / d);
  Vec3 vel{s.v_n, s.v_e, s.v_h};
  double outward = vel.dot(unit);
  if (outward > 0.0) {
    s.v_n -= outward * unit.x;
    s.v_e -= outward * unit.y;
    s.v_h -= outward * unit.z;
  }
}

}  // namespace

bool VehicleState::finite() const { return all_finite(*this); }

void VehicleParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass) || !positive(inertia_xx) || !positive(inertia_yy) ||
      !positive(inertia_zz) || !positive(arm_length) || !positive(rotor_radius) ||
      !positive(max_thrust_per_motor) || !positive(motor_time_constant) ||
      !positive(drag_horizontal) || !positive(drag_vertical) ||
      !positive(angular_drag) || !positive(yaw_torque_ratio) || !positive(max_tilt_deg))
    throw std::invalid_argument("vehicle parameters must be strictly positive");
  if (rotor_plane_offset < 0.0 || !std::isfinite(rotor_plane_offset))
    throw std::invalid_argument("rotor_plane_offset must be non-negative");
  if (rotor_radius >= 2.0 * arm_length)
    throw std::invalid_argument("rotor radius must be < 2 * arm length");
}

void WindField::validate() const {
  if (!(period_s > 0.0)) throw std::invalid_argument("wind period must be > 0");
  if (traversal_deg < 0.0 || traversal_deg > 360.0)
    throw std::invalid_argument("wind traversal must be in [0, 360] degrees");
  if (mean_speed < 0.0) throw std::invalid_argument("wind mean speed must be >= 0");
  if (turbulence < 0.0) throw std::invalid_argument("wind turbulence must be >= 0");
}

void TetherConfig::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("tether radius must be > 0");
}

double ground_effect_factor(double z, double rotor_radius) {
  double zc = std::max(z, 0.3 * rotor_radius);
  double ratio = rotor_radius / (4.0 * zc);
  return 1.0 / (1.0 - ratio * ratio);
}

Vec3 wind_at(double t, const WindField& field, const Seed& stream) {
  double bearing = field.centre_bearing() +
                   0.5 * deg_to_rad(field.traversal_deg) *
                       std::sin(2.0 * kPi * t / field.period_s + field.phase);
  double magnitude = field.mean_speed;
  if (field.turbulence > 0.0) {
    auto tick = static_cast<std::uint64_t>(std::llround(t * 250.0));
    Rng r = stream.child(tick).rng();
    magnitude *= 1.0 + field.turbulence * r.normal();
    magnitude = std::max(0.0, magnitude);
  }
  return {magnitude * std::cos(bearing), magnitude * std::sin(bearing), 0.0};
}

double tilt_angle(const VehicleState& state) {
  Vec3 up = body_up(state.roll, state.pitch, state.yaw);
  return std::acos(std::clamp(up.z, -1.0, 1.0));
}

TetherReport check_tether(const VehicleState& state, const TetherConfig& tether,
                          double yaw_excursion) {
  TetherReport report;
  Vec3 pos{state.p_n, state.p_e, state.h};
  report.radius_exceeded = pos.norm() > tether.radius;
  report.tilt_exceeded = tilt_angle(state) > deg_to_rad(tether.tilt_limit_deg);
  report.yaw_exceeded = std::abs(yaw_excursion) > deg_to_rad(tether.yaw_excursion_deg);
  return report;
}

VehicleState step(const VehicleState& state, const std::array<double, kNumMotors>& pwm,
                  const Vec3& wind, const VehicleParams& params, double dt,
                  const TetherConfig* tether) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!state.finite()) throw SimulationDiverged();

  const auto& geo = geometry();
  VehicleState s = state;
  s.motor_pwm = pwm;

  std::array<double, kNumMotors> thrust_cmd;
  for (int i = 0; i < kNumMotors; ++i) {
    double u = std::clamp(pwm[i], kPwmMin, kPwmMax);
    thrust_cmd[i] = params.max_thrust_per_motor * (u - kPwmMin) / kPwmSpan;
  }

  int substeps = std::max(1, static_cast<int>(std::lround(dt / kSubstep)));
  double h_sub = dt / substeps;
  // Exact discrete solution of the first-order motor lag over one substep.
  double lag = std::exp(-h_sub / params.motor_time_constant);

  for (int step_i = 0; step_i < substeps; ++step_i) {
    for (int i = 0; i < kNumMotors; ++i)
      s.motor_thrust[i] = thrust_cmd[i] + (s.motor_thrust[i] - thrust_cmd[i]) * lag;

    double ge = ground_effect_factor(s.h + params.rotor_plane_offset, params.rotor_radius);
    double total_thrust = 0.0;
    for (int i = 0; i < kNumMotors; ++i) total_thrust += ge * s.motor_thrust[i];

    bool grounded = s.h <= 0.0 && total_thrust <= params.mass * kGravity;
    if (grounded) {
      // Resting on the padded floor: contact friction holds the airframe
      // and the landing legs right it toward level.
      s.h = 0.0;
      s.v_n = s.v_e = s.v_h = 0.0;
      s.p = s.q = s.r = 0.0;
      double righting = std::exp(-h_sub / 0.3);
      s.roll *= righting;
      s.pitch *= righting;
      continue;
    }

    Vec3 up = body_up(s.roll, s.pitch, s.yaw);
    Vec3 vel{s.v_n, s.v_e, s.v_h};
    Vec3 force = up * total_thrust;
    force.z -= params.mass * kGravity;
    force.x += params.drag_horizontal * (wind.x - vel.x);
    force.y += params.drag_horizontal * (wind.y - vel.y);
    force.z += params.drag_vertical * (wind.z - vel.z);

    // Torques in the body frame from per-motor thrust differentials.
    double tau_x = 0.0, tau_y = 0.0, tau_z = 0.0;
    for (int i = 0; i < kNumMotors; ++i) {
      double f = ge * s.motor_thrust[i];
      tau_x += params.arm_length * geo.sin_a[i] * f;
      tau_y -= params.arm_length * geo.cos_a[i] * f;
      tau_z += geo.spin[i] * params.yaw_torque_ratio * f;
    }
    tau_x -= params.angular_drag * s.p;
    tau_y -= params.angular_drag * s.q;
    tau_z -= params.angular_drag * s.r;
    // Gyroscopic coupling, omega x (I omega).
    tau_x -= s.q * s.r * (params.inertia_zz - params.inertia_yy);
    tau_y -= s.r * s.p * (params.inertia_xx - params.inertia_zz);
    tau_z -= s.p * s.q * (params.inertia_yy - params.inertia_xx);

    s.p += h_sub * tau_x / params.inertia_xx;
    s.q += h_sub * tau_y / params.inertia_yy;
    s.r += h_sub * tau_z / params.inertia_zz;

    double cr = std::cos(s.roll), sr = std::sin(s.roll);
    double cp = std::cos(s.pitch), tp = std::tan(s.pitch);
    if (std::abs(cp) < 1e-6) cp = std::copysign(1e-6, cp);
    s.roll += h_sub * (s.p + (s.q * sr + s.r * cr) * tp);
    s.pitch += h_sub * (s.q * cr - s.r * sr);
    s.yaw += h_sub * (s.q * sr + s.r * cr) / cp;
    s.yaw = wrap_radians(s.yaw);

    s.v_n += h_sub * force.x / params.mass;
    s.v_e += h_sub * force.y / params.mass;
    s.v_h += h_sub * force.z / params.mass;
    s.p_n += h_sub * s.v_n;
    s.p_e += h_sub * s.v_e;
    s.h += h_sub * s.v_h;

    if (s.h < 0.0) {
      s.h = 0.0;
      if (s.v_h < 0.0) s.v_h = 0.0;
    }
    if (tether != nullptr) clamp_to_tether_sphere(s, *tether);
  }

  if (!s.finite()) throw SimulationDiverged();
  return s;
}

}  // namespace evobed
