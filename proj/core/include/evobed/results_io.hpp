#ifndef EVOBED_RESULTS_IO_HPP
#define EVOBED_RESULTS_IO_HPP

#include <filesystem>
#include <string>

#include "evobed/config.hpp"
#include "evobed/experiment.hpp"

namespace evobed {

// Shortest round-trip decimal form of a double (locale-free, byte-stable).
std::string format_double(double v);

// Per-generation statistics table: one row per generation.
std::string generations_csv(const RepeatResult& result);

// Population snapshot: genomes in the 18-element serialisation order,
// self-adaptive rates, fitness, success flags and stagnation counters.
std::string population_json(const Population& pop);

std::string individual_json(const Individual& ind, const std::string& schedule_tag);
Individual individual_from_json(const std::string& text);

// 10x10 mean-fitness matrix with the axis values in the published sign
// convention, plus termination tallies per cell.
std::string sweep_csv(const SweepGrid& grid);

std::string compare_stats_json(const CompareResult& result, int generation_cap);

// A self-describing record of one trial: plant, wind, noise, tether,
// schedule, gains and seed; enough to re-execute it bit-exactly.
struct TrialRecord {
  VehicleParams vehicle;
  WindField wind;
  SensorNoise noise;
  TetherConfig tether;
  bool tether_pull_enabled = true;
  WaypointSchedule schedule;
  GainSet gains;
  std::uint64_t seed = 0;
  double fitness = 0.0;
  std::string reason;
  double duration = 0.0;
};

std::string trial_record_json(const TrialRecord& record);
TrialRecord trial_record_from_json(const std::string& text);

// Re-executes a recorded trial and returns the fresh outcome; the caller
// compares against the recorded fitness bit-exactly.
TrialOutcome replay_trial(const TrialRecord& record);

// Records a fresh trial of `gains` under `ctx` for later replay.
TrialRecord record_trial(const GainSet& gains, const TrialContext& ctx, Seed seed);

// Full 250 Hz fitness series of one trial (t, components, cumulative).
std::string trial_series_csv(const TrialOutcome& outcome);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Persists one repeat under dir: generations.csv, best.json, a replayable
// best_trial.json, and population snapshots (every generation at
// verbosity >= 1, final only at 0).
void write_repeat(const std::filesystem::path& dir, const RepeatResult& result,
                  const ExperimentSetup& setup, int verbosity);

}  // namespace evobed

#endif
