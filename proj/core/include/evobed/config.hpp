#ifndef EVOBED_CONFIG_HPP
#define EVOBED_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>

#include "evobed/experiment.hpp"

namespace evobed {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Everything a full experiment run needs, read from one human-editable
// JSON document. Every key has a documented default; an empty document is a
// valid full-protocol configuration. Unknown keys are rejected.
struct ExperimentConfig {
  VehicleParams vehicle;
  WindField wind;
  SensorNoise noise;
  double ose_tether_radius = 0.22;
  double tse_tether_radius = 0.62;
  double tilt_limit_deg = 60.0;
  double yaw_excursion_deg = 160.0;

  int repeats = 10;
  int generalisation_repeats = 20;
  int sweep_repeats = 20;
  int population_size = kDefaultPopulationSize;
  int generation_cap = 200;
  int bootstrap_budget = kDefaultBootstrapBudget;
  double trial_seconds = 0.0;  // 0 = full schedule length
  std::string ose_schedule = "ose";
  std::string tse_schedule = "tse";
  std::string unseen_schedule = "unseen";
  std::map<std::string, WaypointSchedule> custom_schedules;

  std::uint64_t seed = 1;  // fixed default; never wall-clock seeded
  std::string out_dir = "results";
  int workers = 0;  // 0 = available parallelism
  int log_verbosity = 1;

  // Resolves schedule names (custom table first, then built-ins), applies
  // the trial_seconds truncation and the worker default.
  ExperimentSetup make_setup() const;

  WaypointSchedule resolve_schedule(const std::string& name) const;

  void validate() const;
};

// Parses the documented key-value tree; defaults fill anything missing.
// Schema violations raise ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);

// Canonical serialisation; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace evobed

#endif
