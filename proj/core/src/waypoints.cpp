#include "evobed/waypoints.hpp"

#include <algorithm>
#include <stdexcept>

namespace evobed {

void WaypointSchedule::validate() const {
  if (entries.empty()) throw std::invalid_argument("waypoint schedule is empty");
  if (entries.front().t_start != 0.0)
    throw std::invalid_argument("waypoint schedule must start at t=0");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].t_start <= entries[i - 1].t_start)
      throw std::invalid_argument("waypoint times must be strictly increasing");
  if (duration <= entries.back().t_start)
    throw std::invalid_argument("schedule duration must exceed the last waypoint time");
}

const Waypoint& WaypointSchedule::active(double t) const {
  const Waypoint* current = &entries.front().waypoint;
  for (const auto& e : entries) {
    if (e.t_start <= t)
      current = &e.waypoint;
    else
      break;
  }
  return *current;
}

WaypointSchedule WaypointSchedule::truncated(double seconds) const {
  if (seconds >= duration) return *this;
  WaypointSchedule out;
  out.name = name;
  out.duration = seconds;
  for (const auto& e : entries)
    if (e.t_start < seconds) out.entries.push_back(e);
  return out;
}

namespace {

WaypointSchedule make(const std::string& name,
                      std::initializer_list<TimedWaypoint> entries) {
  WaypointSchedule s;
  s.name = name;
  s.entries = entries;
  s.duration = 60.0;
  s.validate();
  return s;
}

}  // namespace

WaypointSchedule ose_schedule() {
  return make("ose", {
                         {0.0, {0.0, 0.0, 0.2, 40.0}},
                         {10.0, {0.06, -0.06, 0.2, -5.0}},
                         {20.0, {-0.06, 0.06, 0.2, 40.0}},
                         {30.0, {0.06, 0.06, 0.2, 85.0}},
                         {40.0, {0.06, 0.06, 0.2, 40.0}},
                         {50.0, {0.0, 0.0, 0.2, 40.0}},
                     });
}

WaypointSchedule tse_schedule() {
  return make("tse", {
                         {0.0, {0.0, 0.0, 0.2, 40.0}},
                         {10.0, {0.15, -0.15, 0.25, -5.0}},
                         {20.0, {-0.15, 0.15, 0.4, 40.0}},
                         {30.0, {0.15, 0.15, 0.25, 85.0}},
                         {40.0, {0.15, 0.15, 0.4, 40.0}},
                         {50.0, {0.0, 0.0, 0.25, 40.0}},
                     });
}

WaypointSchedule unseen_schedule() {
  return make("unseen", {
                            {0.0, {0.0, 0.0, 0.4, -10.0}},
                            {10.0, {-0.25, 0.25, 0.2, 45.0}},
                            {20.0, {0.25, -0.25, 0.4, 85.0}},
                            {30.0, {0.25, 0.25, 0.4, 85.0}},
                            {40.0, {0.0, 0.0, 0.3, -10.0}},
                            {50.0, {-0.25, -0.25, 0.4, 45.0}},
                        });
}

WaypointSchedule builtin_schedule(const std::string& name) {
  if (name == "ose") return ose_schedule();
  if (name == "tse") return tse_schedule();
  if (name == "unseen") return unseen_schedule();
  throw std::invalid_argument("unknown schedule: " + name);
}

}  // namespace evobed
