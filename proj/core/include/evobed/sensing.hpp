#ifndef EVOBED_SENSING_HPP
#define EVOBED_SENSING_HPP

#include <array>

#include "evobed/dynamics.hpp"
#include "evobed/rng.hpp"

namespace evobed {

// 1-sigma additive noise per channel. Attitude noise is a slowly wandering
// estimation error (Ornstein-Uhlenbeck with a 0.4 s correlation time, the
// character of an AHRS error), not white per-sample noise; rate, position
// and height noise are white per sample.
struct SensorNoise {
  double attitude_deg = 0.5;
  double rate_dps = 2.0;
  double position_m = 0.002;
  double height_m = 0.00075;

  static SensorNoise none() { return {0.0, 0.0, 0.0, 0.0}; }
};

inline constexpr double kAttitudeNoiseTau = 0.4;  // s

// What the controller and the fitness function see. Attitude and rates
// refresh at the 250 Hz control rate, position at 60 Hz, height at 20 Hz;
// each group holds its last value between updates.
struct SensedState {
  double roll = 0.0, pitch = 0.0, yaw = 0.0;  // rad
  double p = 0.0, q = 0.0, r = 0.0;           // rad/s
  double p_n = 0.0, p_e = 0.0;                // m
  double v_n = 0.0, v_e = 0.0;                // m/s, regression estimates
  double h = 0.0;                             // m
  double v_h = 0.0;                           // m/s, regression estimate
  bool position_updated = false;              // fresh sample this tick
  bool height_updated = false;
};

// Simulates the estimation stack at the hardware cadences. Velocities come
// from the least-squares slope over the last five samples of each channel
// and report zero until the window has filled.
class SensorSim {
 public:
  SensorSim(const SensorNoise& noise, Seed seed);

  // Sample at control tick `tick` (250 Hz, tick 0 at t = 0).
  SensedState sample(const VehicleState& truth, int tick);

  const SensedState& last() const { return last_; }

 private:
  struct Window {
    std::array<double, 5> t{};
    std::array<double, 5> v{};
    int count = 0;

    void push(double time, double value);
    double slope() const;  // zero until full
  };

  SensorNoise noise_;
  Rng rng_;
  SensedState last_;
  Window north_, east_, height_;
  double att_err_roll_ = 0.0, att_err_pitch_ = 0.0, att_err_yaw_ = 0.0;  // rad
  bool att_err_init_ = false;
};

}  // namespace evobed

#endif
