#ifndef EVOBED_DYNAMICS_HPP
#define EVOBED_DYNAMICS_HPP

#include <array>
#include <stdexcept>

#include "evobed/geometry.hpp"
#include "evobed/rng.hpp"

namespace evobed {

// Motor command range (PWM microseconds).
inline constexpr double kPwmMin = 1090.0;
inline constexpr double kPwmMax = 1950.0;
inline constexpr double kPwmSpan = kPwmMax - kPwmMin;

inline constexpr int kNumMotors = 6;

inline constexpr double kGravity = 9.81;  // m/s^2

// Frame conventions: world axes are north/east/up, yaw is measured from
// north toward east. Attitude is the Euler sequence Rz(yaw)*Ry(pitch)*Rx(roll)
// acting on the body z axis (thrust direction): positive pitch tilts the
// thrust vector toward body-forward, positive roll toward body-left.

struct VehicleState {
  double p_n = 0.0, p_e = 0.0;   // m from testbed centre
  double h = 0.0;                // m above floor
  double v_n = 0.0, v_e = 0.0, v_h = 0.0;  // m/s
  double roll = 0.0, pitch = 0.0, yaw = 0.0;  // rad
  double p = 0.0, q = 0.0, r = 0.0;           // body rates, rad/s
  std::array<double, kNumMotors> motor_pwm{};     // last commanded PWM
  std::array<double, kNumMotors> motor_thrust{};  // N, lag state per motor

  bool finite() const;
};

struct VehicleParams {
  double mass = 1.5;             // kg
  double inertia_xx = 0.035;     // kg m^2
  double inertia_yy = 0.035;
  double inertia_zz = 0.06;
  double arm_length = 0.30;      // m
  double rotor_radius = 0.12;    // m
  // Per-motor thrust at full command. Calibrated so the hover trim sits
  // 220 PWM units above idle, inside the integral-term authority implied by
  // the gain initialisation envelope.
  double max_thrust_per_motor = 9.587;   // N
  double motor_time_constant = 0.03;     // s
  double drag_horizontal = 0.22;         // N s/m, linear
  double drag_vertical = 0.45;           // N s/m
  double angular_drag = 0.02;            // N m s/rad
  double yaw_torque_ratio = 0.05;        // N m of reaction torque per N thrust
  double rotor_plane_offset = 0.10;      // m, rotor height above floor at rest
  double max_tilt_deg = 60.0;

  void validate() const;

  // PWM command of one motor whose thrust equals its share of the weight,
  // outside ground effect. Used by tests and the current-draw proxy.
  double hover_pwm() const {
    return kPwmMin + kPwmSpan * mass * kGravity /
                         (static_cast<double>(kNumMotors) * max_thrust_per_motor);
  }
};

struct WindField {
  double mean_speed = 5.0;      // m/s
  double traversal_deg = 120.0; // total sweep angle
  double period_s = 10.0;       // oscillation period
  double phase = 0.0;           // rad
  double fan_n = -1.35;         // m, fan position at the testbed edge
  double fan_e = 0.0;
  double turbulence = 0.05;     // multiplicative noise fraction (1 sigma)

  void validate() const;

  // Bearing from the fan toward the testbed centre; the sweep is centred on it.
  double centre_bearing() const { return std::atan2(-fan_e, -fan_n); }
};

struct TetherConfig {
  double radius = 0.22;             // m; 0.22 for OSE, 0.62 for TSE stage 2
  double tilt_limit_deg = 60.0;
  double yaw_excursion_deg = 160.0;

  void validate() const;
};

struct TetherReport {
  bool radius_exceeded = false;
  bool tilt_exceeded = false;
  bool yaw_exceeded = false;  // |yaw excursion from start| over the limit
};

struct SimulationDiverged : std::runtime_error {
  SimulationDiverged() : std::runtime_error("simulation diverged: non-finite state") {}
};

// Thrust multiplier near the floor: 1 / (1 - (R/4z)^2), with z clamped below
// at 0.3 R to stay clear of the pole at z = R/4.
double ground_effect_factor(double z, double rotor_radius);

// Wind vector at time t. The direction sweeps sinusoidally through the
// traversal angle; the magnitude carries multiplicative seeded noise keyed
// on the 250 Hz tick so the field is a pure function of (t, phase, seed).
Vec3 wind_at(double t, const WindField& field, const Seed& stream);

// Advance the rigid body by dt using 1 kHz semi-implicit Euler substeps.
// PWM commands are held over the step; wind is the sampled vector for the
// step. When a tether is given, position is projected back onto its sphere
// with the outward radial velocity removed, every substep.
VehicleState step(const VehicleState& state, const std::array<double, kNumMotors>& pwm,
                  const Vec3& wind, const VehicleParams& params, double dt,
                  const TetherConfig* tether = nullptr);

// Reports which tether bounds the state violates; yaw_excursion is the
// unwrapped rotation from the trial's starting yaw, in radians.
TetherReport check_tether(const VehicleState& state, const TetherConfig& tether,
                          double yaw_excursion);

// Tilt of the body z axis from vertical, radians.
double tilt_angle(const VehicleState& state);

}  // namespace evobed

#endif
