#ifndef EVOBED_SUPERVISOR_HPP
#define EVOBED_SUPERVISOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "evobed/controller.hpp"
#include "evobed/dynamics.hpp"
#include "evobed/fitness.hpp"
#include "evobed/sensing.hpp"
#include "evobed/waypoints.hpp"

namespace evobed {

enum class TerminationReason {
  Completed,
  Tilt,            // roll, pitch or sustained yaw error outside the angle rules
  AngularRate,
  HorizontalVelocity,
  VerticalVelocity,
  Current,
  NoTakeoff,
  TetherPull,      // height beyond the short-tether pull line
  TetherRadius,    // yaw excursion winding up the tether wires
};

const char* to_string(TerminationReason r);
TerminationReason termination_reason_from_string(const std::string& s);

// Safety-termination thresholds. Flight-envelope rules arm once the vehicle
// has taken off; a grounded airframe can only fail the takeoff window or
// the current rule.
struct TrialRules {
  double roll_limit_deg = 60.0;
  double pitch_limit_deg = 15.0;
  double yaw_error_limit_deg = 15.0;
  double yaw_error_hold_s = 0.5;  // sustained before terminating
  double rate_limit_dps = 250.0;
  double horizontal_velocity_limit = 0.5;   // m/s
  double vertical_velocity_limit = 0.25;    // m/s
  double current_limit_amps = 20.0;
  double hover_current_amps = 12.0;  // draw at hover throttle
  double max_current_amps = 60.0;    // draw at full throttle
  double takeoff_height = 0.02;      // m, sensed
  double takeoff_window_s = 5.0;
  bool tether_pull_enabled = true;   // short-tether rule only
  double tether_pull_height = 0.18;  // m
};

// Estimated total current draw, linear in the mean delivered motor throttle
// (the lag state, i.e. what the motors are actually producing), calibrated
// through the hover and full-throttle draws.
double current_amps(const VehicleState& state, const VehicleParams& params,
                    double hover_amps, double max_amps);

// Applies the rule set tick by tick on the sensed state. check() returns
// the reason at the first tick a threshold is crossed.
class TerminationMonitor {
 public:
  TerminationMonitor(const TrialRules& rules, const TetherConfig& tether);

  std::optional<TerminationReason> check(const SensedState& sensed,
                                         double setpoint_yaw_deg, double amps,
                                         double t);

  bool airborne() const { return airborne_; }

 private:
  TrialRules rules_;
  TetherConfig tether_;
  bool airborne_ = false;
  double yaw_err_since_ = -1.0;
  bool have_prev_yaw_ = false;
  double prev_yaw_ = 0.0;
  double yaw_excursion_ = 0.0;  // rad, unwrapped from the start
};

// Everything one evaluation needs beyond the gain set.
struct TrialContext {
  VehicleParams vehicle;
  WindField wind;
  SensorNoise noise;
  FitnessLimits limits;
  TetherConfig tether;
  TrialRules rules;
  WaypointSchedule schedule;
};

struct TrialTickLog {
  double t = 0.0;
  FitnessBreakdown breakdown;
  double cumulative = 0.0;
};

struct TrialOutcome {
  double fitness = 0.0;
  TerminationReason reason = TerminationReason::Completed;
  double duration = 0.0;  // s
  std::uint64_t seed = 0;
  std::vector<TrialTickLog> series;  // only populated on request

  bool completed() const { return reason == TerminationReason::Completed; }
};

// One evaluation: reset to the centre with a seeded yaw in +/-60 degrees,
// seeded wind phase, then the 250 Hz control loop against the plant until
// the schedule completes or a rule fires. A diverged simulation is
// invalidated and re-run on a fresh sub-seed.
TrialOutcome run_trial(const GainSet& gains, const TrialContext& ctx, Seed seed,
                       bool capture_series = false);

struct EvalResult {
  double fitness = 0.0;
  bool success = false;
  int trials_run = 0;
  std::vector<TrialOutcome> outcomes;
};

// The 3-repeat protocol: a failed run ends the evaluation with the fitness
// accumulated so far averaged over the runs performed; success requires
// completing all three.
EvalResult evaluate(const GainSet& gains, const TrialContext& ctx, Seed seed);

// Short hover probe at 10 cm with all other DoFs neutral; viable iff the
// vehicle stays airborne for 0.2 s without tripping any rule.
bool bootstrap_viable(const GainSet& gains, const TrialContext& ctx, Seed seed);

}  // namespace evobed

#endif
