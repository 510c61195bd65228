#ifndef EVOBED_WAYPOINTS_HPP
#define EVOBED_WAYPOINTS_HPP

#include <string>
#include <vector>

namespace evobed {

// A timed setpoint. Yaw is kept in degrees: schedules are written and logged
// in the same units the experiment tables use.
struct Waypoint {
  double north = 0.0;  // m
  double east = 0.0;   // m
  double height = 0.0; // m
  double yaw_deg = 0.0;
};

struct TimedWaypoint {
  double t_start = 0.0;  // s
  Waypoint waypoint;
};

struct WaypointSchedule {
  std::string name;
  std::vector<TimedWaypoint> entries;
  double duration = 0.0;  // s

  void validate() const;

  // Waypoint active at time t (last entry whose t_start <= t).
  const Waypoint& active(double t) const;

  // Copy truncated to the first `seconds` of the schedule.
  WaypointSchedule truncated(double seconds) const;
};

// Built-in schedules: the one-stage and two-stage hover courses and the
// held-out generalisation course. 60 s total, transitions every 10 s.
WaypointSchedule ose_schedule();
WaypointSchedule tse_schedule();
WaypointSchedule unseen_schedule();

// Lookup by name ("ose", "tse", "unseen"); throws on unknown names.
WaypointSchedule builtin_schedule(const std::string& name);

}  // namespace evobed

#endif
