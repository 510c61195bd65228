#ifndef EVOBED_EXPERIMENT_HPP
#define EVOBED_EXPERIMENT_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "evobed/evolution.hpp"
#include "evobed/stats.hpp"
#include "evobed/supervisor.hpp"
#include "evobed/waypoints.hpp"

namespace evobed {

// Shared plant, scoring and protocol settings for a whole experiment.
struct ExperimentSetup {
  VehicleParams vehicle;
  WindField wind;
  SensorNoise noise;
  FitnessLimits limits;
  TrialRules rules;
  double ose_tether_radius = 0.22;  // m
  double tse_tether_radius = 0.62;  // m
  double tilt_limit_deg = 60.0;
  double yaw_excursion_deg = 160.0;
  WaypointSchedule ose = ose_schedule();
  WaypointSchedule tse = tse_schedule();
  WaypointSchedule unseen = unseen_schedule();
  int population_size = kDefaultPopulationSize;
  int generation_cap = 200;
  int bootstrap_budget = kDefaultBootstrapBudget;
  int workers = 1;

  // Short-tether stage: pull rule armed.
  TrialContext ose_context() const;
  // Long-tether stage: pull rule disabled.
  TrialContext tse_context() const;
  // Generalisation runs: unseen schedule on the long tether.
  TrialContext unseen_context() const;
};

using ProgressLog = std::function<void(const std::string&)>;

struct GenerationStats {
  int generation = 0;
  std::string stage;  // "ose", "tse1" or "tse2"
  double best = 0.0, mean = 0.0, worst = 0.0;
  int successes = 0;
  double mean_cr = 0.0, mean_f = 0.0;
};

struct RepeatResult {
  std::string method;  // "ose" or "tse"
  int repeat_index = 0;
  std::uint64_t seed = 0;
  // Generation at which the whole population was successful; -1 when the
  // cap was reached first.
  int convergence_generation = -1;
  int stage_boundary = -1;  // generation of the first success (tse only)
  std::vector<GenerationStats> generations;
  Population final_population;
  Individual best;
  // Schedule the fitness numbers were accumulated on; totals are only
  // comparable within one schedule.
  std::string fitness_schedule;
  int bootstrap_attempts = 0;

  bool converged() const { return convergence_generation >= 0; }
};

RepeatResult run_ose(const ExperimentSetup& setup, Seed seed,
                     const ProgressLog& log = nullptr);

// Stage 1 flies the short tether until the first success appears, then a
// fresh population is reseeded from that controller (each gain perturbed by
// uniform noise of +/-25% of its initialisation range, rates re-drawn) and
// stage 2 continues on the long tether until the population converges.
RepeatResult run_tse(const ExperimentSetup& setup, Seed seed,
                     const ProgressLog& log = nullptr);

struct GeneralisationResult {
  std::vector<double> mean_fitness;                // per controller
  std::vector<std::vector<double>> trial_fitness;  // [controller][repeat]
  std::vector<std::vector<TerminationReason>> reasons;
};

// Evaluates each controller `repeats` times on the unseen schedule, long
// tether, no success gating; terminated trials keep their accumulated score.
GeneralisationResult evaluate_generalisation(const std::vector<GainSet>& controllers,
                                             const ExperimentSetup& setup, int repeats,
                                             Seed seed);

struct SweepGrid {
  std::string pair;        // "ID", "PI" or "PD"
  std::string row_gain;    // gain varied across rows
  std::string col_gain;    // gain varied across columns
  // Axis values in the published sign convention (height gains negated).
  std::array<double, 10> row_values{};
  std::array<double, 10> col_values{};
  std::array<std::array<double, 10>, 10> mean_fitness{};
  std::array<std::array<int, 10>, 10> no_takeoff{};
  std::array<std::array<int, 10>, 10> completed{};
};

struct SweepResult {
  std::array<SweepGrid, 3> grids;
  GainSet base;
  double reference_mean = 0.0;  // base controller under the same protocol
  int repeats = 0;
};

// The height-gain sensitivity sweep: for each gain pair a 10x10 grid around
// the published ranges, the third height gain held at the base value, every
// cell run `repeats` times on the unseen schedule.
SweepResult gain_sweep(const GainSet& base, const ExperimentSetup& setup, int repeats,
                       Seed seed, const ProgressLog& log = nullptr);

struct CompareResult {
  std::vector<RepeatResult> ose;
  std::vector<RepeatResult> tse;
  std::vector<double> ose_convergence;  // capped at generation_cap when unconverged
  std::vector<double> tse_convergence;
  MannWhitneyResult convergence_test;  // left tail of TSE vs OSE generations
  GeneralisationResult ose_generalisation;
  GeneralisationResult tse_generalisation;
  MannWhitneyResult generalisation_test;  // left tail of OSE vs TSE mean fitness
  int generalisation_repeats = 0;
};

// The full protocol comparison: N repeats of each method, convergence
// statistics, then the best controller per repeat evaluated on the unseen
// schedule.
CompareResult run_comparison(const ExperimentSetup& setup, int repeats,
                             int generalisation_repeats, Seed seed,
                             const ProgressLog& log = nullptr);

// Best-by-fitness member of a finished repeat.
const Individual& best_of(const Population& pop);

}  // namespace evobed

#endif
