#include "evobed/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "evobed/geometry.hpp"
#include "evobed/sensing.hpp"
#include "evobed/waypoints.hpp"

namespace evobed {

void FitnessLimits::validate() const {
  const double pairs[][2] = {
      {position, position_core},       {height, height_core},
      {yaw, yaw_core},                 {attitude, attitude_core},
      {vel_horizontal, vel_horizontal_core},
      {vel_vertical, vel_vertical_core},
      {rate, rate_core},
  };
  for (const auto& p : pairs)
    if (!(p[1] > 0.0) || !(p[0] > p[1]))
      throw std::invalid_argument("fitness limits require 0 < core range < full range");
}

double fitness_kernel(double error, double range, double core_range) {
  if (!(core_range > 0.0) || !(range > core_range))
    throw std::invalid_argument("fitness kernel requires 0 < core range < full range");
  if (error > core_range)
    return std::max((range - error) / (4.0 * (range - core_range)), 0.0);
  return 3.0 * (core_range - error) / (4.0 * core_range) + 0.25;
}

FitnessBreakdown cycle_fitness(const SensedState& sensed, const Waypoint& setpoint,
                               double tilt_setpoint_roll_deg,
                               double tilt_setpoint_pitch_deg, int saturated_channels,
                               const FitnessLimits& limits) {
  FitnessBreakdown b;

  double en = setpoint.north - sensed.p_n;
  double ee = setpoint.east - sensed.p_e;
  b.f_p = fitness_kernel(std::hypot(en, ee), limits.position, limits.position_core);

  b.f_h = fitness_kernel(std::abs(setpoint.height - sensed.h), limits.height,
                         limits.height_core);

  double yaw_err = wrap_degrees(setpoint.yaw_deg - rad_to_deg(sensed.yaw));
  b.f_psi = fitness_kernel(std::abs(yaw_err), limits.yaw, limits.yaw_core);

  b.f_a = fitness_kernel(std::abs(tilt_setpoint_roll_deg - rad_to_deg(sensed.roll)),
                         limits.attitude, limits.attitude_core) +
          fitness_kernel(std::abs(tilt_setpoint_pitch_deg - rad_to_deg(sensed.pitch)),
                         limits.attitude, limits.attitude_core);

  b.f_vh = fitness_kernel(std::hypot(sensed.v_n, sensed.v_e), limits.vel_horizontal,
                          limits.vel_horizontal_core);
  b.f_vv = fitness_kernel(std::abs(sensed.v_h), limits.vel_vertical,
                          limits.vel_vertical_core);

  b.f_omega = fitness_kernel(std::abs(rad_to_deg(sensed.p)), limits.rate, limits.rate_core) +
              fitness_kernel(std::abs(rad_to_deg(sensed.q)), limits.rate, limits.rate_core);

  b.f_l = 1.0 - std::clamp(saturated_channels, 0, 4) / 4.0;

  b.sum = b.f_p + b.f_h + b.f_psi + b.f_a + b.f_vh + b.f_vv + b.f_omega + b.f_l;
  return b;
}

}  // namespace evobed
