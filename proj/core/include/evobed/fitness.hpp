#ifndef EVOBED_FITNESS_HPP
#define EVOBED_FITNESS_HPP

#include <stdexcept>

namespace evobed {

struct SensedState;
struct Waypoint;

// Error ranges for the per-cycle score. Full range l marks where a
// component's score reaches zero; core range l_c marks where the steep
// inner slope hands over to the shallow outer slope at a score of 0.25.
// Angles in degrees, distances in metres, rates in deg/s.
struct FitnessLimits {
  double position = 0.2, position_core = 0.07;      // m
  double height = 0.2, height_core = 0.03;          // m
  double yaw = 30.0, yaw_core = 10.0;               // deg
  double attitude = 15.0, attitude_core = 3.0;      // deg
  double vel_horizontal = 1.0, vel_horizontal_core = 0.2;  // m/s
  double vel_vertical = 1.0, vel_vertical_core = 0.1;      // m/s
  double rate = 250.0, rate_core = 30.0;            // deg/s

  void validate() const;
};

struct FitnessBreakdown {
  double f_p = 0.0;    // horizontal position
  double f_h = 0.0;    // height
  double f_psi = 0.0;  // yaw
  double f_a = 0.0;    // roll + pitch tracking, in [0, 2]
  double f_vh = 0.0;   // horizontal velocity
  double f_vv = 0.0;   // vertical velocity
  double f_omega = 0.0;  // roll + pitch rates, in [0, 2]
  double f_l = 0.0;    // controller saturation
  double sum = 0.0;    // cycle total, in [0, 10]
};

inline constexpr double kCycleRate = 250.0;        // Hz
inline constexpr double kMaxCycleFitness = 10.0;
inline constexpr double kMaxTrialSeconds = 60.0;
inline constexpr double kMaxTrialFitness = 150000.0;

// Piecewise per-component score: 1 at zero error, 0.25 at the core range,
// 0 at and beyond the full range, linear in between on both sides.
double fitness_kernel(double error, double range, double core_range);

// One control cycle of the compound score, computed on the sensed state.
// tilt_setpoint_* are the outer-loop attitude setpoints in degrees;
// saturated_channels counts delta outputs pinned at their +/-300 bound.
FitnessBreakdown cycle_fitness(const SensedState& sensed, const Waypoint& setpoint,
                               double tilt_setpoint_roll_deg,
                               double tilt_setpoint_pitch_deg, int saturated_channels,
                               const FitnessLimits& limits);

inline double accumulate_fitness(double total, const FitnessBreakdown& b) {
  return total + b.sum;
}

}  // namespace evobed

#endif
