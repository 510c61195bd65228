#include "evobed/sensing.hpp"

namespace evobed {

namespace {

// True when `rate_hz` divides into the 250 Hz tick grid at this tick.
bool cadence_fires(int tick, int rate_hz) {
  if (tick == 0) return true;
  return (static_cast<long>(tick) * rate_hz) / 250 !=
         (static_cast<long>(tick - 1) * rate_hz) / 250;
}

}  // namespace

void SensorSim::Window::push(double time, double value) {
  if (count < 5) {
    t[count] = time;
    v[count] = value;
    ++count;
    return;
  }
  for (int i = 0; i < 4; ++i) {
    t[i] = t[i + 1];
    v[i] = v[i + 1];
  }
  t[4] = time;
  v[4] = value;
}

double SensorSim::Window::slope() const {
  if (count < 5) return 0.0;
  double mt = 0.0, mv = 0.0;
  for (int i = 0; i < 5; ++i) {
    mt += t[i];
    mv += v[i];
  }
  mt /= 5.0;
  mv /= 5.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 5; ++i) {
    num += (t[i] - mt) * (v[i] - mv);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0.0 ? num / den : 0.0;
}

SensorSim::SensorSim(const SensorNoise& noise, Seed seed)
    : noise_(noise), rng_(seed.value) {}

SensedState SensorSim::sample(const VehicleState& truth, int tick) {
  double t = tick / 250.0;
  SensedState s = last_;
  s.position_updated = false;
  s.height_updated = false;

  double sigma_att = deg_to_rad(noise_.attitude_deg);
  if (sigma_att > 0.0) {
    if (!att_err_init_) {
      att_err_roll_ = sigma_att * rng_.normal();
      att_err_pitch_ = sigma_att * rng_.normal();
      att_err_yaw_ = sigma_att * rng_.normal();
      att_err_init_ = true;
    } else {
      double decay = std::exp(-1.0 / (250.0 * kAttitudeNoiseTau));
      double diffusion = sigma_att * std::sqrt(1.0 - decay * decay);
      att_err_roll_ = att_err_roll_ * decay + diffusion * rng_.normal();
      att_err_pitch_ = att_err_pitch_ * decay + diffusion * rng_.normal();
      att_err_yaw_ = att_err_yaw_ * decay + diffusion * rng_.normal();
    }
  }
  s.roll = truth.roll + att_err_roll_;
  s.pitch = truth.pitch + att_err_pitch_;
  s.yaw = wrap_radians(truth.yaw + att_err_yaw_);

  double sigma_rate = deg_to_rad(noise_.rate_dps);
  if (sigma_rate > 0.0) {
    s.p = truth.p + sigma_rate * rng_.normal();
    s.q = truth.q + sigma_rate * rng_.normal();
    s.r = truth.r + sigma_rate * rng_.normal();
  } else {
    s.p = truth.p;
    s.q = truth.q;
    s.r = truth.r;
  }

  if (cadence_fires(tick, 60)) {
    double noise_n = noise_.position_m > 0.0 ? noise_.position_m * rng_.normal() : 0.0;
    double noise_e = noise_.position_m > 0.0 ? noise_.position_m * rng_.normal() : 0.0;
    s.p_n = truth.p_n + noise_n;
    s.p_e = truth.p_e + noise_e;
    north_.push(t, s.p_n);
    east_.push(t, s.p_e);
    s.v_n = north_.slope();
    s.v_e = east_.slope();
    s.position_updated = true;
  }
  if (cadence_fires(tick, 20)) {
    s.h = truth.h + (noise_.height_m > 0.0 ? noise_.height_m * rng_.normal() : 0.0);
    height_.push(t, s.h);
    s.v_h = height_.slope();
    s.height_updated = true;
  }

  last_ = s;
  return s;
}

}  // namespace evobed
