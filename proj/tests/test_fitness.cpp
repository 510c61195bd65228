#include <doctest.h>

#include <cmath>

#include "evobed/fitness.hpp"
#include "evobed/geometry.hpp"
#include "evobed/rng.hpp"
#include "evobed/sensing.hpp"
#include "evobed/waypoints.hpp"

using namespace evobed;

namespace {

// The seven (range, core) pairs used by the compound score.
const double kLimitPairs[7][2] = {
    {0.2, 0.07}, {0.2, 0.03}, {30.0, 10.0}, {15.0, 3.0},
    {1.0, 0.2},  {1.0, 0.1},  {250.0, 30.0},
};

}  // namespace

TEST_CASE("kernel hits 1 at zero error for every limit pair") {
  for (const auto& p : kLimitPairs)
    CHECK(fitness_kernel(0.0, p[0], p[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kernel equals 0.25 at the core range from both branches") {
  for (const auto& p : kLimitPairs) {
    double at = fitness_kernel(p[1], p[0], p[1]);
    CHECK(at == doctest::Approx(0.25).epsilon(1e-12));
    // Continuity across the branch boundary.
    double below = fitness_kernel(p[1] * (1.0 - 1e-9), p[0], p[1]);
    double above = fitness_kernel(p[1] * (1.0 + 1e-9), p[0], p[1]);
    CHECK(std::abs(below - 0.25) < 1e-6);
    CHECK(std::abs(above - 0.25) < 1e-6);
  }
}

TEST_CASE("kernel clamps to zero at and beyond the full range") {
  for (const auto& p : kLimitPairs) {
    CHECK(fitness_kernel(p[0], p[0], p[1]) == 0.0);
    CHECK(fitness_kernel(p[0] * 2.5, p[0], p[1]) == 0.0);
  }
}

TEST_CASE("kernel midpoint of the outer branch scores 0.125") {
  for (const auto& p : kLimitPairs) {
    double mid = 0.5 * (p[0] + p[1]);
    CHECK(fitness_kernel(mid, p[0], p[1]) == doctest::Approx(0.125).epsilon(1e-12));
  }
}

TEST_CASE("kernel is non-increasing on a dense grid") {
  for (const auto& p : kLimitPairs) {
    double prev = fitness_kernel(0.0, p[0], p[1]);
    for (int i = 1; i <= 1000; ++i) {
      double e = 1.2 * p[0] * i / 1000.0;
      double v = fitness_kernel(e, p[0], p[1]);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("kernel rejects invalid limits") {
  CHECK_THROWS_AS(fitness_kernel(0.1, 0.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fitness_kernel(0.1, 0.07, 0.2), std::invalid_argument);
}

TEST_CASE("wrap matches the atan2 identity") {
  CHECK(wrap_degrees(0.0) == 0.0);
  CHECK(wrap_degrees(190.0) == doctest::Approx(-170.0).epsilon(1e-12));
  CHECK(std::abs(wrap_degrees(-360.0)) < 1e-12);
  CHECK(wrap_degrees(180.0) == doctest::Approx(180.0).epsilon(1e-12));
  // Oracle: the raw atan2 form, on a sweep of angles.
  for (int i = -720; i <= 720; i += 7) {
    double g = static_cast<double>(i);
    double oracle = rad_to_deg(std::atan2(std::sin(deg_to_rad(g)), std::cos(deg_to_rad(g))));
    CHECK(wrap_degrees(g) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("perfect hover scores a cycle sum of exactly 10") {
  SensedState s;
  Waypoint sp;
  FitnessLimits limits;
  FitnessBreakdown b = cycle_fitness(s, sp, 0.0, 0.0, 0, limits);
  CHECK(b.sum == 10.0);
  CHECK(b.f_a == 2.0);
  CHECK(b.f_omega == 2.0);
  CHECK(b.f_l == 1.0);
}

TEST_CASE("all errors at full range with all channels saturated scores 0") {
  SensedState s;
  s.p_n = 1.0;               // 1 m off, beyond the 0.2 m range
  s.h = 1.0;                 // setpoint 0
  s.yaw = deg_to_rad(90.0);  // 90 deg error, beyond 30
  s.roll = deg_to_rad(20.0);
  s.pitch = deg_to_rad(-20.0);
  s.v_n = 2.0;
  s.v_h = 2.0;
  s.p = deg_to_rad(300.0);
  s.q = deg_to_rad(-300.0);
  Waypoint sp;
  FitnessLimits limits;
  FitnessBreakdown b = cycle_fitness(s, sp, 0.0, 0.0, 4, limits);
  CHECK(b.sum == 0.0);
}

TEST_CASE("yaw error at the core range costs exactly 0.75") {
  SensedState s;
  Waypoint sp;
  sp.yaw_deg = 10.0;
  FitnessLimits limits;
  FitnessBreakdown b = cycle_fitness(s, sp, 0.0, 0.0, 0, limits);
  CHECK(b.f_psi == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b.sum == doctest::Approx(9.25).epsilon(1e-12));
}

TEST_CASE("cycle fitness is invariant to the yaw representation") {
  SensedState s;
  s.yaw = deg_to_rad(15.0);
  Waypoint sp;
  sp.yaw_deg = 40.0;
  FitnessLimits limits;
  FitnessBreakdown a = cycle_fitness(s, sp, 1.0, -2.0, 1, limits);
  s.yaw = wrap_radians(deg_to_rad(15.0 + 360.0));
  sp.yaw_deg += 360.0;
  FitnessBreakdown b = cycle_fitness(s, sp, 1.0, -2.0, 1, limits);
  CHECK(a.sum == doctest::Approx(b.sum).epsilon(1e-12));
}

TEST_CASE("components stay within their stated ranges for arbitrary input") {
  FitnessLimits limits;
  Rng rng(Seed{42}.value);
  for (int i = 0; i < 2000; ++i) {
    SensedState s;
    s.p_n = rng.uniform(-2.0, 2.0);
    s.p_e = rng.uniform(-2.0, 2.0);
    s.h = rng.uniform(0.0, 2.0);
    s.yaw = rng.uniform(-kPi, kPi);
    s.roll = rng.uniform(-1.0, 1.0);
    s.pitch = rng.uniform(-1.0, 1.0);
    s.v_n = rng.uniform(-3.0, 3.0);
    s.v_e = rng.uniform(-3.0, 3.0);
    s.v_h = rng.uniform(-3.0, 3.0);
    s.p = rng.uniform(-8.0, 8.0);
    s.q = rng.uniform(-8.0, 8.0);
    Waypoint sp{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.0, 0.6),
                rng.uniform(-180.0, 180.0)};
    int sat = static_cast<int>(rng.uniform_index(5));
    FitnessBreakdown b = cycle_fitness(s, sp, rng.uniform(-15.0, 15.0),
                                       rng.uniform(-15.0, 15.0), sat, limits);
    for (double v : {b.f_p, b.f_h, b.f_psi, b.f_vh, b.f_vv, b.f_l}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (double v : {b.f_a, b.f_omega}) {
      CHECK(v >= 0.0);
      CHECK(v <= 2.0);
    }
    CHECK(b.sum >= 0.0);
    CHECK(b.sum <= 10.0);
    CHECK(b.sum ==
          doctest::Approx(b.f_p + b.f_h + b.f_psi + b.f_a + b.f_vh + b.f_vv + b.f_omega +
                          b.f_l)
              .epsilon(1e-12));
  }
}

TEST_CASE("accumulation reaches the ceiling for a perfect 60 s trial") {
  SensedState s;
  Waypoint sp;
  FitnessLimits limits;
  FitnessBreakdown b = cycle_fitness(s, sp, 0.0, 0.0, 0, limits);
  double total = 0.0;
  int cycles = static_cast<int>(kCycleRate * kMaxTrialSeconds);
  for (int i = 0; i < cycles; ++i) total = accumulate_fitness(total, b);
  CHECK(total == kMaxTrialFitness);

  total = 0.0;
  for (int i = 0; i < cycles / 2; ++i) total = accumulate_fitness(total, b);
  CHECK(total == 75000.0);
}

TEST_CASE("empty trial accumulates nothing") {
  double total = 0.0;
  CHECK(total == 0.0);
}
