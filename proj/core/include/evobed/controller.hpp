#ifndef EVOBED_CONTROLLER_HPP
#define EVOBED_CONTROLLER_HPP

#include <array>

#include "evobed/dynamics.hpp"
#include "evobed/sensing.hpp"
#include "evobed/waypoints.hpp"

namespace evobed {

// Controlled degrees of freedom, in genome serialisation order.
enum class Dof { Roll = 0, Pitch, Yaw, Height, North, East };
inline constexpr int kNumDofs = 6;

// Gain units follow the command scaling the initialisation envelope is
// written in: attitude gains are PWM per degree of error, the height gains
// PWM per centimetre, and the position gains centimetres of tilt command
// per centimetre of error. Height gains are positive-up internally; files
// that mirror the published sweep tables carry them negated.
struct Gains3 {
  double kp = 0.0, ki = 0.0, kd = 0.0;
};

struct GainSet {
  std::array<Gains3, kNumDofs> dof{};

  Gains3& operator[](Dof d) { return dof[static_cast<int>(d)]; }
  const Gains3& operator[](Dof d) const { return dof[static_cast<int>(d)]; }

  // Flat 18-element view in (rollP, rollI, rollD, pitchP, ..., eastD) order.
  std::array<double, 18> to_array() const;
  static GainSet from_array(const std::array<double, 18>& a);

  bool finite() const;
};

// Upper bound of the uniform initialisation envelope per DoF: the maximum
// command divided by the error limit (300/15 for attitude, 300/10cm for
// height, 20cm/15cm for position).
double gain_init_upper(Dof d);

// Evolved gains may leave the initialisation envelope, but not unboundedly.
inline constexpr double kGainSlackFactor = 4.0;
GainSet clamp_to_sanity(const GainSet& g);

// Command saturation of each PID output channel.
inline constexpr double kDeltaLimit = 300.0;  // PWM
// Outer-loop position command envelope (centimetres), mapped onto the
// attitude error limit as a tilt setpoint.
inline constexpr double kPositionCmdLimit = 20.0;  // cm

// Per-DoF error limits applied before the PIDs.
inline constexpr double kHeightErrorLimit = 0.10;    // m
inline constexpr double kAttitudeErrorLimitDeg = 15.0;
inline constexpr double kPositionErrorLimit = 0.15;  // m

// Setpoint transition rate limits.
inline constexpr double kYawRateLimitDps = 30.0;
inline constexpr double kPositionRateLimit = 0.1;  // m/s
inline constexpr double kHeightRateLimit = 0.2;    // m/s

// Slew limit on the outer-loop tilt setpoints. The 60 Hz position loop
// steps its output; the inner derivative acts on the error, so those steps
// are smoothed the same way waypoint transitions are.
inline constexpr double kTiltSlewDps = 60.0;

struct DeltaCommands {
  double roll = 0.0, pitch = 0.0, yaw = 0.0, thrust = 0.0;  // PWM units
  std::array<bool, 4> saturated{};  // roll, pitch, yaw, thrust at the clamp

  int saturated_count() const {
    int n = 0;
    for (bool s : saturated) n += s ? 1 : 0;
    return n;
  }
};

struct ErrorSet {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
  double height_m = 0.0;
  double north_m = 0.0;
  double east_m = 0.0;
  // Estimate freshness this tick; derivatives difference consecutive
  // samples of a channel, not the 250 Hz zero-order hold.
  bool position_fresh = true;
  bool height_fresh = true;
};

class ControllerState {
 public:
  void reset();

  double roll_setpoint_deg() const { return roll_sp_deg_; }
  double pitch_setpoint_deg() const { return pitch_sp_deg_; }

  friend ErrorSet compute_errors(const SensedState& estimate, const Waypoint& setpoint,
                                 const ControllerState& state);
  friend DeltaCommands pid_step(const ErrorSet& errors, const GainSet& gains,
                                ControllerState& state, double dt, bool outer_update,
                                double sensed_yaw_rad, bool airborne);

 private:
  struct Channel {
    double integral = 0.0;  // error * s
    double prev_error = 0.0;
    bool has_prev = false;
    double derivative = 0.0;   // held between estimate updates
    double deriv_dt = 0.0;     // time since the previous differenced sample

    void reset() { *this = Channel{}; }
    // PID output with rectangular integration, anti-windup clamp at the
    // level that alone saturates the output, and backward-difference
    // derivative on the error. The derivative is refreshed when the
    // underlying estimate is (fresh) and held in between.
    double update(double error, const Gains3& g, double dt, double output_limit,
                  bool fresh = true);
  };

  Channel roll_, pitch_, yaw_, height_, north_, east_;
  double roll_sp_deg_ = 0.0;
  double pitch_sp_deg_ = 0.0;
  double roll_sp_target_deg_ = 0.0;
  double pitch_sp_target_deg_ = 0.0;
  double outer_dt_accum_ = 0.0;
};

// Setpoint-minus-estimate errors: yaw wrapped before limiting, every
// channel saturated to its limit. Attitude errors are taken against the
// held outer-loop setpoints.
ErrorSet compute_errors(const SensedState& estimate, const Waypoint& setpoint,
                        const ControllerState& state);

// One 250 Hz control step. The position loop runs when outer_update is set
// (the 60 Hz position estimate refreshed) and holds its attitude setpoints
// in between; the inner attitude and height loops run every call. Until the
// vehicle is airborne every integrator except height is held at zero: a
// grounded airframe cannot act on attitude, yaw or position errors, and
// the bottom motor clamp would rectify wound-up differentials into thrust.
DeltaCommands pid_step(const ErrorSet& errors, const GainSet& gains,
                       ControllerState& state, double dt, bool outer_update,
                       double sensed_yaw_rad, bool airborne = true);

struct MixResult {
  std::array<double, kNumMotors> pwm{};
  std::array<bool, kNumMotors> clamped{};
};

// Linear hexacopter mixer: base + thrust with roll/pitch/yaw differentials
// per motor geometry, clamped to the PWM range.
MixResult mix(const DeltaCommands& delta, double base_pwm);

// Move each setpoint component toward the target at no more than its rate
// limit, reaching it exactly. Yaw takes the shortest wrapped path.
Waypoint rate_limit_setpoint(const Waypoint& current, const Waypoint& target, double dt);

}  // namespace evobed

#endif
