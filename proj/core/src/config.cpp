#include "evobed/config.hpp"

#include <json.hpp>

#include "evobed/parallel.hpp"

namespace evobed {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

WaypointSchedule ExperimentConfig::resolve_schedule(const std::string& name) const {
  auto it = custom_schedules.find(name);
  WaypointSchedule s = it != custom_schedules.end() ? it->second : builtin_schedule(name);
  if (trial_seconds > 0.0) s = s.truncated(trial_seconds);
  return s;
}

ExperimentSetup ExperimentConfig::make_setup() const {
  validate();
  ExperimentSetup setup;
  setup.vehicle = vehicle;
  setup.wind = wind;
  setup.noise = noise;
  setup.ose_tether_radius = ose_tether_radius;
  setup.tse_tether_radius = tse_tether_radius;
  setup.tilt_limit_deg = tilt_limit_deg;
  setup.yaw_excursion_deg = yaw_excursion_deg;
  setup.ose = resolve_schedule(ose_schedule);
  setup.tse = resolve_schedule(tse_schedule);
  setup.unseen = resolve_schedule(unseen_schedule);
  setup.population_size = population_size;
  setup.generation_cap = generation_cap;
  setup.bootstrap_budget = bootstrap_budget;
  setup.workers = workers > 0 ? workers : default_workers();
  return setup;
}

void ExperimentConfig::validate() const {
  vehicle.validate();
  wind.validate();
  if (!(ose_tether_radius > 0.0)) throw ConfigError("config key 'tether.ose_radius': must be > 0");
  if (!(tse_tether_radius > 0.0)) throw ConfigError("config key 'tether.tse_radius': must be > 0");
  if (repeats < 1) throw ConfigError("config key 'protocol.repeats': must be >= 1");
  if (population_size < 4)
    throw ConfigError("config key 'protocol.population_size': must be >= 4");
  if (generation_cap < 1)
    throw ConfigError("config key 'protocol.generation_cap': must be >= 1");
  if (trial_seconds < 0.0)
    throw ConfigError("config key 'protocol.trial_seconds': must be >= 0");
  // Every referenced schedule must resolve.
  for (const auto& name : {ose_schedule, tse_schedule, unseen_schedule}) {
    try {
      resolve_schedule(name);
    } catch (const std::exception& e) {
      throw ConfigError("config schedule '" + name + "': " + e.what());
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "(root)");
  check_keys(root, "", {"seed", "out_dir", "workers", "log_verbosity", "vehicle",
                        "wind", "sensors", "tether", "protocol", "schedules"});

  ExperimentConfig c;
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail("seed", "expected an integer");
    c.seed = v.get<std::uint64_t>();
  }
  c.out_dir = get_string(root, "", "out_dir", c.out_dir);
  c.workers = get_int(root, "", "workers", c.workers);
  c.log_verbosity = get_int(root, "", "log_verbosity", c.log_verbosity);

  if (root.contains("vehicle")) {
    const json& v = root.at("vehicle");
    require_object(v, "vehicle");
    check_keys(v, "vehicle",
               {"mass", "inertia", "arm_length", "rotor_radius", "max_thrust_per_motor",
                "motor_time_constant", "drag_horizontal", "drag_vertical",
                "angular_drag", "yaw_torque_ratio", "rotor_plane_offset"});
    VehicleParams& p = c.vehicle;
    p.mass = get_number(v, "vehicle.", "mass", p.mass);
    if (v.contains("inertia")) {
      const json& in = v.at("inertia");
      if (!in.is_array() || in.size() != 3) fail("vehicle.inertia", "expected [xx, yy, zz]");
      p.inertia_xx = in[0].get<double>();
      p.inertia_yy = in[1].get<double>();
      p.inertia_zz = in[2].get<double>();
    }
    p.arm_length = get_number(v, "vehicle.", "arm_length", p.arm_length);
    p.rotor_radius = get_number(v, "vehicle.", "rotor_radius", p.rotor_radius);
    p.max_thrust_per_motor =
        get_number(v, "vehicle.", "max_thrust_per_motor", p.max_thrust_per_motor);
    p.motor_time_constant =
        get_number(v, "vehicle.", "motor_time_constant", p.motor_time_constant);
    p.drag_horizontal = get_number(v, "vehicle.", "drag_horizontal", p.drag_horizontal);
    p.drag_vertical = get_number(v, "vehicle.", "drag_vertical", p.drag_vertical);
    p.angular_drag = get_number(v, "vehicle.", "angular_drag", p.angular_drag);
    p.yaw_torque_ratio = get_number(v, "vehicle.", "yaw_torque_ratio", p.yaw_torque_ratio);
    p.rotor_plane_offset =
        get_number(v, "vehicle.", "rotor_plane_offset", p.rotor_plane_offset);
  }

  if (root.contains("wind")) {
    const json& w = root.at("wind");
    require_object(w, "wind");
    check_keys(w, "wind",
               {"mean_speed", "traversal_deg", "period_s", "turbulence", "fan_position"});
    c.wind.mean_speed = get_number(w, "wind.", "mean_speed", c.wind.mean_speed);
    c.wind.traversal_deg = get_number(w, "wind.", "traversal_deg", c.wind.traversal_deg);
    c.wind.period_s = get_number(w, "wind.", "period_s", c.wind.period_s);
    c.wind.turbulence = get_number(w, "wind.", "turbulence", c.wind.turbulence);
    if (w.contains("fan_position")) {
      const json& f = w.at("fan_position");
      if (!f.is_array() || f.size() != 2) fail("wind.fan_position", "expected [north, east]");
      c.wind.fan_n = f[0].get<double>();
      c.wind.fan_e = f[1].get<double>();
    }
  }

  if (root.contains("sensors")) {
    const json& s = root.at("sensors");
    require_object(s, "sensors");
    check_keys(s, "sensors",
               {"attitude_noise_deg", "rate_noise_dps", "position_noise_m",
                "height_noise_m"});
    c.noise.attitude_deg =
        get_number(s, "sensors.", "attitude_noise_deg", c.noise.attitude_deg);
    c.noise.rate_dps = get_number(s, "sensors.", "rate_noise_dps", c.noise.rate_dps);
    c.noise.position_m = get_number(s, "sensors.", "position_noise_m", c.noise.position_m);
    c.noise.height_m = get_number(s, "sensors.", "height_noise_m", c.noise.height_m);
  }

  if (root.contains("tether")) {
    const json& t = root.at("tether");
    require_object(t, "tether");
    check_keys(t, "tether",
               {"ose_radius", "tse_radius", "tilt_limit_deg", "yaw_excursion_deg"});
    c.ose_tether_radius = get_number(t, "tether.", "ose_radius", c.ose_tether_radius);
    c.tse_tether_radius = get_number(t, "tether.", "tse_radius", c.tse_tether_radius);
    c.tilt_limit_deg = get_number(t, "tether.", "tilt_limit_deg", c.tilt_limit_deg);
    c.yaw_excursion_deg =
        get_number(t, "tether.", "yaw_excursion_deg", c.yaw_excursion_deg);
  }

  if (root.contains("protocol")) {
    const json& p = root.at("protocol");
    require_object(p, "protocol");
    check_keys(p, "protocol",
               {"repeats", "generalisation_repeats", "sweep_repeats", "population_size",
                "generation_cap", "bootstrap_budget", "trial_seconds", "ose_schedule",
                "tse_schedule", "unseen_schedule"});
    c.repeats = get_int(p, "protocol.", "repeats", c.repeats);
    c.generalisation_repeats =
        get_int(p, "protocol.", "generalisation_repeats", c.generalisation_repeats);
    c.sweep_repeats = get_int(p, "protocol.", "sweep_repeats", c.sweep_repeats);
    c.population_size = get_int(p, "protocol.", "population_size", c.population_size);
    c.generation_cap = get_int(p, "protocol.", "generation_cap", c.generation_cap);
    c.bootstrap_budget = get_int(p, "protocol.", "bootstrap_budget", c.bootstrap_budget);
    c.trial_seconds = get_number(p, "protocol.", "trial_seconds", c.trial_seconds);
    c.ose_schedule = get_string(p, "protocol.", "ose_schedule", c.ose_schedule);
    c.tse_schedule = get_string(p, "protocol.", "tse_schedule", c.tse_schedule);
    c.unseen_schedule = get_string(p, "protocol.", "unseen_schedule", c.unseen_schedule);
  }

  if (root.contains("schedules")) {
    const json& s = root.at("schedules");
    require_object(s, "schedules");
    for (auto it = s.begin(); it != s.end(); ++it) {
      const json& rows = it.value();
      if (!rows.is_array()) fail("schedules." + it.key(), "expected an array of rows");
      WaypointSchedule sched;
      sched.name = it.key();
      for (const json& row : rows) {
        if (!row.is_array() || row.size() != 5)
          fail("schedules." + it.key(), "each row must be [t, north, east, height, yaw]");
        TimedWaypoint tw;
        tw.t_start = row[0].get<double>();
        tw.waypoint = {row[1].get<double>(), row[2].get<double>(), row[3].get<double>(),
                       row[4].get<double>()};
        sched.entries.push_back(tw);
      }
      sched.duration = sched.entries.empty() ? 0.0 : sched.entries.back().t_start + 10.0;
      try {
        sched.validate();
      } catch (const std::exception& e) {
        fail("schedules." + it.key(), e.what());
      }
      c.custom_schedules[it.key()] = sched;
    }
  }

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  root["seed"] = c.seed;
  root["out_dir"] = c.out_dir;
  root["workers"] = c.workers;
  root["log_verbosity"] = c.log_verbosity;
  root["vehicle"] = {
      {"mass", c.vehicle.mass},
      {"inertia", {c.vehicle.inertia_xx, c.vehicle.inertia_yy, c.vehicle.inertia_zz}},
      {"arm_length", c.vehicle.arm_length},
      {"rotor_radius", c.vehicle.rotor_radius},
      {"max_thrust_per_motor", c.vehicle.max_thrust_per_motor},
      {"motor_time_constant", c.vehicle.motor_time_constant},
      {"drag_horizontal", c.vehicle.drag_horizontal},
      {"drag_vertical", c.vehicle.drag_vertical},
      {"angular_drag", c.vehicle.angular_drag},
      {"yaw_torque_ratio", c.vehicle.yaw_torque_ratio},
      {"rotor_plane_offset", c.vehicle.rotor_plane_offset},
  };
  root["wind"] = {
      {"mean_speed", c.wind.mean_speed},   {"traversal_deg", c.wind.traversal_deg},
      {"period_s", c.wind.period_s},       {"turbulence", c.wind.turbulence},
      {"fan_position", {c.wind.fan_n, c.wind.fan_e}},
  };
  root["sensors"] = {
      {"attitude_noise_deg", c.noise.attitude_deg},
      {"rate_noise_dps", c.noise.rate_dps},
      {"position_noise_m", c.noise.position_m},
      {"height_noise_m", c.noise.height_m},
  };
  root["tether"] = {
      {"ose_radius", c.ose_tether_radius},
      {"tse_radius", c.tse_tether_radius},
      {"tilt_limit_deg", c.tilt_limit_deg},
      {"yaw_excursion_deg", c.yaw_excursion_deg},
  };
  root["protocol"] = {
      {"repeats", c.repeats},
      {"generalisation_repeats", c.generalisation_repeats},
      {"sweep_repeats", c.sweep_repeats},
      {"population_size", c.population_size},
      {"generation_cap", c.generation_cap},
      {"bootstrap_budget", c.bootstrap_budget},
      {"trial_seconds", c.trial_seconds},
      {"ose_schedule", c.ose_schedule},
      {"tse_schedule", c.tse_schedule},
      {"unseen_schedule", c.unseen_schedule},
  };
  json schedules = json::object();
  for (const auto& [name, sched] : c.custom_schedules) {
    json rows = json::array();
    for (const auto& tw : sched.entries)
      rows.push_back({tw.t_start, tw.waypoint.north, tw.waypoint.east,
                      tw.waypoint.height, tw.waypoint.yaw_deg});
    schedules[name] = rows;
  }
  root["schedules"] = schedules;
  return root.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace evobed
