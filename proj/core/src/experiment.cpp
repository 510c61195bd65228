#include "evobed/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "evobed/parallel.hpp"

namespace evobed {

namespace {

constexpr std::uint64_t kTagBootstrap = 11;
constexpr std::uint64_t kTagInitialEval = 12;
constexpr std::uint64_t kTagGeneration = 13;
constexpr std::uint64_t kTagReseed = 14;
constexpr std::uint64_t kTagStage2Eval = 15;
constexpr std::uint64_t kTagOse = 21;
constexpr std::uint64_t kTagTse = 22;
constexpr std::uint64_t kTagGeneralisation = 23;
constexpr std::uint64_t kTagSweep = 24;
constexpr std::uint64_t kTagSweepReference = 25;

GenerationStats stats_of(const Population& pop, const std::string& stage) {
  GenerationStats s;
  s.generation = pop.generation;
  s.stage = stage;
  s.best = -1.0;
  s.worst = -1.0;
  double sum = 0.0, sum_cr = 0.0, sum_f = 0.0;
  for (const auto& m : pop.members) {
    if (s.best < 0.0 || m.fitness > s.best) s.best = m.fitness;
    if (s.worst < 0.0 || m.fitness < s.worst) s.worst = m.fitness;
    sum += m.fitness;
    sum_cr += m.cr;
    sum_f += m.f;
    s.successes += m.success ? 1 : 0;
  }
  auto n = static_cast<double>(pop.members.size());
  s.mean = sum / n;
  s.mean_cr = sum_cr / n;
  s.mean_f = sum_f / n;
  return s;
}

void log_line(const ProgressLog& log, const std::string& line) {
  if (log) log(line);
}

}  // namespace

TrialContext ExperimentSetup::ose_context() const {
  TrialContext ctx{vehicle, wind, noise, limits,
                   TetherConfig{ose_tether_radius, tilt_limit_deg, yaw_excursion_deg},
                   rules, ose};
  ctx.rules.tether_pull_enabled = true;
  return ctx;
}

TrialContext ExperimentSetup::tse_context() const {
  TrialContext ctx{vehicle, wind, noise, limits,
                   TetherConfig{tse_tether_radius, tilt_limit_deg, yaw_excursion_deg},
                   rules, tse};
  ctx.rules.tether_pull_enabled = false;
  return ctx;
}

TrialContext ExperimentSetup::unseen_context() const {
  TrialContext ctx{vehicle, wind, noise, limits,
                   TetherConfig{tse_tether_radius, tilt_limit_deg, yaw_excursion_deg},
                   rules, unseen};
  ctx.rules.tether_pull_enabled = false;
  return ctx;
}

const Individual& best_of(const Population& pop) {
  if (pop.members.empty()) throw std::logic_error("empty population");
  const Individual* best = &pop.members.front();
  for (const auto& m : pop.members)
    if (m.fitness > best->fitness) best = &m;
  return *best;
}

RepeatResult run_ose(const ExperimentSetup& setup, Seed seed, const ProgressLog& log) {
  RepeatResult result;
  result.method = "ose";
  result.seed = seed.value;
  result.fitness_schedule = setup.ose.name;

  TrialContext ctx = setup.ose_context();
  auto viable = [&](const GainSet& g, Seed s) { return bootstrap_viable(g, ctx, s); };
  auto evaluator = [&](const GainSet& g, Seed s) { return evaluate(g, ctx, s); };

  Population pop = bootstrap_population(setup.population_size, setup.bootstrap_budget,
                                        viable, seed.child(kTagBootstrap),
                                        &result.bootstrap_attempts);
  evaluate_population(pop, evaluator, seed.child(kTagInitialEval), setup.workers, false);
  result.generations.push_back(stats_of(pop, "ose"));
  log_line(log, "ose g0 best=" + std::to_string(result.generations.back().best));

  while (pop.generation < setup.generation_cap && !converged(pop)) {
    generation_step(pop, evaluator, seed.child(kTagGeneration).child(pop.generation),
                    setup.workers);
    result.generations.push_back(stats_of(pop, "ose"));
    const auto& gs = result.generations.back();
    log_line(log, "ose g" + std::to_string(gs.generation) +
                      " best=" + std::to_string(gs.best) +
                      " successes=" + std::to_string(gs.successes));
  }
  if (converged(pop)) result.convergence_generation = pop.generation;
  result.best = best_of(pop);
  result.final_population = std::move(pop);
  return result;
}

RepeatResult run_tse(const ExperimentSetup& setup, Seed seed, const ProgressLog& log) {
  RepeatResult result;
  result.method = "tse";
  result.seed = seed.value;
  result.fitness_schedule = setup.tse.name;

  TrialContext stage1 = setup.ose_context();
  auto viable = [&](const GainSet& g, Seed s) { return bootstrap_viable(g, stage1, s); };
  auto eval1 = [&](const GainSet& g, Seed s) { return evaluate(g, stage1, s); };

  Population pop = bootstrap_population(setup.population_size, setup.bootstrap_budget,
                                        viable, seed.child(kTagBootstrap),
                                        &result.bootstrap_attempts);
  std::optional<int> first_success = evaluate_population(
      pop, eval1, seed.child(kTagInitialEval), setup.workers, true);
  result.generations.push_back(stats_of(pop, "tse1"));

  while (!first_success && pop.generation < setup.generation_cap) {
    GenerationOutcome out = generation_step(
        pop, eval1, seed.child(kTagGeneration).child(pop.generation), setup.workers, true);
    first_success = out.first_success_slot;
    result.generations.push_back(stats_of(pop, "tse1"));
    log_line(log, "tse1 g" + std::to_string(pop.generation) +
                      " best=" + std::to_string(result.generations.back().best));
  }
  if (!first_success) {
    // Stage 1 never produced a success within the cap; record and stop.
    result.best = best_of(pop);
    result.final_population = std::move(pop);
    return result;
  }

  result.stage_boundary = pop.generation;
  const Individual source = pop.members[*first_success];
  log_line(log, "tse reseed at g" + std::to_string(result.stage_boundary));

  // Stage 2: population reseeded from the first success, each gain under
  // uniform noise of +/-25% of that gain's initialisation range.
  Population pop2;
  pop2.generation = pop.generation;
  pop2.members.resize(setup.population_size);
  Seed reseed = seed.child(kTagReseed);
  for (int i = 0; i < setup.population_size; ++i) {
    Rng rng = reseed.child(i).rng();
    GainSet g = source.gains;
    for (int d = 0; d < kNumDofs; ++d) {
      double range = gain_init_upper(static_cast<Dof>(d));
      g.dof[d].kp += rng.uniform(-0.25 * range, 0.25 * range);
      g.dof[d].ki += rng.uniform(-0.25 * range, 0.25 * range);
      g.dof[d].kd += rng.uniform(-0.25 * range, 0.25 * range);
    }
    Individual& ind = pop2.members[i];
    ind.gains = clamp_to_sanity(g);
    ind.cr = rng.uniform(kCrLow, kCrHigh);
    ind.f = rng.uniform(kFLow, kFHigh);
  }

  TrialContext stage2 = setup.tse_context();
  auto eval2 = [&](const GainSet& g, Seed s) { return evaluate(g, stage2, s); };
  evaluate_population(pop2, eval2, seed.child(kTagStage2Eval), setup.workers, false);
  result.generations.push_back(stats_of(pop2, "tse2"));

  while (pop2.generation < setup.generation_cap && !converged(pop2)) {
    generation_step(pop2, eval2, seed.child(kTagGeneration).child(pop2.generation),
                    setup.workers);
    result.generations.push_back(stats_of(pop2, "tse2"));
    const auto& gs = result.generations.back();
    log_line(log, "tse2 g" + std::to_string(gs.generation) +
                      " best=" + std::to_string(gs.best) +
                      " successes=" + std::to_string(gs.successes));
  }
  if (converged(pop2)) result.convergence_generation = pop2.generation;
  result.best = best_of(pop2);
  result.final_population = std::move(pop2);
  return result;
}

GeneralisationResult evaluate_generalisation(const std::vector<GainSet>& controllers,
                                             const ExperimentSetup& setup, int repeats,
                                             Seed seed) {
  GeneralisationResult result;
  auto n = static_cast<int>(controllers.size());
  result.mean_fitness.resize(n, 0.0);
  result.trial_fitness.assign(n, std::vector<double>(repeats, 0.0));
  result.reasons.assign(n, std::vector<TerminationReason>(
                               repeats, TerminationReason::Completed));

  TrialContext ctx = setup.unseen_context();
  parallel_for(n * repeats, setup.workers, [&](int idx) {
    int c = idx / repeats;
    int k = idx % repeats;
    TrialOutcome o = run_trial(controllers[c], ctx,
                               seed.child(kTagGeneralisation).child(c).child(k));
    result.trial_fitness[c][k] = o.fitness;
    result.reasons[c][k] = o.reason;
  });
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    for (double f : result.trial_fitness[c]) sum += f;
    result.mean_fitness[c] = repeats > 0 ? sum / repeats : 0.0;
  }
  return result;
}

SweepResult gain_sweep(const GainSet& base, const ExperimentSetup& setup, int repeats,
                       Seed seed, const ProgressLog& log) {
  SweepResult result;
  result.base = base;
  result.repeats = repeats;

  // Published step grids for the height gains; internal values are
  // positive-up, the published tables carry them negated.
  std::array<double, 10> p_vals, i_vals, d_vals;
  for (int k = 0; k < 10; ++k) {
    p_vals[k] = 0.1 * (k + 1);
    i_vals[k] = 0.15 * (k + 1);
    d_vals[k] = 0.05 * (k + 1);
  }

  struct PairSpec {
    const char* name;
    const char* row;
    const char* col;
    const std::array<double, 10>* rows;
    const std::array<double, 10>* cols;
  };
  const PairSpec specs[3] = {
      {"ID", "I", "D", &i_vals, &d_vals},
      {"PI", "P", "I", &p_vals, &i_vals},
      {"PD", "P", "D", &p_vals, &d_vals},
  };

  TrialContext ctx = setup.unseen_context();

  for (int pair = 0; pair < 3; ++pair) {
    SweepGrid& grid = result.grids[pair];
    grid.pair = specs[pair].name;
    grid.row_gain = specs[pair].row;
    grid.col_gain = specs[pair].col;
    for (int k = 0; k < 10; ++k) {
      grid.row_values[k] = -(*specs[pair].rows)[k];
      grid.col_values[k] = -(*specs[pair].cols)[k];
    }

    std::vector<double> trial_fitness(100 * repeats, 0.0);
    std::vector<TerminationReason> trial_reason(100 * repeats,
                                                TerminationReason::Completed);
    parallel_for(100 * repeats, setup.workers, [&](int idx) {
      int cell = idx / repeats;
      int rep = idx % repeats;
      int row = cell / 10, col = cell % 10;
      GainSet g = base;
      Gains3& height = g[Dof::Height];
      double row_v = (*specs[pair].rows)[row];
      double col_v = (*specs[pair].cols)[col];
      if (grid.pair == "ID") {
        height.ki = row_v;
        height.kd = col_v;
      } else if (grid.pair == "PI") {
        height.kp = row_v;
        height.ki = col_v;
      } else {
        height.kp = row_v;
        height.kd = col_v;
      }
      TrialOutcome o = run_trial(
          g, ctx, seed.child(kTagSweep).child(pair).child(cell).child(rep));
      trial_fitness[idx] = o.fitness;
      trial_reason[idx] = o.reason;
    });
    for (int cell = 0; cell < 100; ++cell) {
      double sum = 0.0;
      int nt = 0, done = 0;
      for (int rep = 0; rep < repeats; ++rep) {
        int idx = cell * repeats + rep;
        sum += trial_fitness[idx];
        if (trial_reason[idx] == TerminationReason::NoTakeoff) ++nt;
        if (trial_reason[idx] == TerminationReason::Completed) ++done;
      }
      grid.mean_fitness[cell / 10][cell % 10] = sum / repeats;
      grid.no_takeoff[cell / 10][cell % 10] = nt;
      grid.completed[cell / 10][cell % 10] = done;
    }
    log_line(log, std::string("sweep ") + grid.pair + " done");
  }

  double ref_sum = 0.0;
  for (int k = 0; k < repeats; ++k)
    ref_sum += run_trial(base, ctx, seed.child(kTagSweepReference).child(k)).fitness;
  result.reference_mean = ref_sum / repeats;
  return result;
}

CompareResult run_comparison(const ExperimentSetup& setup, int repeats,
                             int generalisation_repeats, Seed seed,
                             const ProgressLog& log) {
  CompareResult result;
  result.generalisation_repeats = generalisation_repeats;

  for (int r = 0; r < repeats; ++r) {
    log_line(log, "=== ose repeat " + std::to_string(r));
    RepeatResult rr = run_ose(setup, seed.child(kTagOse).child(r), log);
    rr.repeat_index = r;
    result.ose.push_back(std::move(rr));
  }
  for (int r = 0; r < repeats; ++r) {
    log_line(log, "=== tse repeat " + std::to_string(r));
    RepeatResult rr = run_tse(setup, seed.child(kTagTse).child(r), log);
    rr.repeat_index = r;
    result.tse.push_back(std::move(rr));
  }

  auto convergence_of = [&](const std::vector<RepeatResult>& rs) {
    std::vector<double> gens;
    for (const auto& r : rs)
      gens.push_back(r.converged() ? static_cast<double>(r.convergence_generation)
                                   : static_cast<double>(setup.generation_cap));
    return gens;
  };
  result.ose_convergence = convergence_of(result.ose);
  result.tse_convergence = convergence_of(result.tse);
  result.convergence_test = mann_whitney_u(result.tse_convergence, result.ose_convergence);

  std::vector<GainSet> ose_best, tse_best;
  for (const auto& r : result.ose) ose_best.push_back(r.best.gains);
  for (const auto& r : result.tse) tse_best.push_back(r.best.gains);
  result.ose_generalisation = evaluate_generalisation(
      ose_best, setup, generalisation_repeats, seed.child(kTagGeneralisation).child(1));
  result.tse_generalisation = evaluate_generalisation(
      tse_best, setup, generalisation_repeats, seed.child(kTagGeneralisation).child(2));
  result.generalisation_test = mann_whitney_u(result.ose_generalisation.mean_fitness,
                                              result.tse_generalisation.mean_fitness);
  return result;
}

}  // namespace evobed
