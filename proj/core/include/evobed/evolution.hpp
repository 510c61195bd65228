#ifndef EVOBED_EVOLUTION_HPP
#define EVOBED_EVOLUTION_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "evobed/controller.hpp"
#include "evobed/rng.hpp"
#include "evobed/supervisor.hpp"

namespace evobed {

inline constexpr double kCrLow = 0.0, kCrHigh = 1.0;
inline constexpr double kFLow = 0.0, kFHigh = 2.0;
inline constexpr int kStagnationRestart = 5;  // generations without a fitter child
inline constexpr int kDefaultPopulationSize = 20;
inline constexpr int kDefaultBootstrapBudget = 5000;

struct Individual {
  GainSet gains;
  double cr = 0.5;
  double f = 1.0;
  double fitness = 0.0;
  bool success = false;
  int stagnation = 0;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;

  bool all_evaluated = false;
};

struct BootstrapExhausted : std::runtime_error {
  BootstrapExhausted(int budget)
      : std::runtime_error("bootstrap could not find enough viable gain sets within " +
                           std::to_string(budget) + " attempts") {}
};

using Evaluator = std::function<EvalResult(const GainSet&, Seed)>;
using ViabilityTest = std::function<bool(const GainSet&, Seed)>;

// Samples gain sets uniformly inside the initialisation envelope, keeping
// only those that pass the viability probe, until the population is full.
// Rates are drawn uniformly inside their bounds. attempts_out, when given,
// reports how many candidates were drawn.
Population bootstrap_population(int size, int attempt_budget, const ViabilityTest& viable,
                                Seed seed, int* attempts_out = nullptr);

// Donor vector r3 + F * (r1 - r2), elementwise over the 18 gains.
GainSet donor_vector(const GainSet& r1, const GainSet& r2, const GainSet& r3, double f);

// Binomial crossover with a forced index: the child takes the donor value
// at index R and wherever rand < CR, the parent value elsewhere.
GainSet crossover(const GainSet& parent, const GainSet& donor, double cr, Rng& rng);

// Lognormal self-adaptation, each rate multiplied by e^N(0,1) then clamped
// to its bounds. The _with variant takes the normal draws explicitly.
std::pair<double, double> mutate_rates(double cr, double f, Rng& rng);
std::pair<double, double> mutate_rates_with(double cr, double f, double z_cr, double z_f);

// Evaluates every member (used after bootstrap and after reseeding).
// Returns the slot index of the first success when stop_at_first_success
// is set; members after it keep fitness 0 and are not evaluated further
// in scan order (all evaluations still run, their results are discarded).
std::optional<int> evaluate_population(Population& pop, const Evaluator& evaluator,
                                       Seed seed, int workers,
                                       bool stop_at_first_success);

struct GenerationOutcome {
  int replacements = 0;
  int rate_restarts = 0;
  std::optional<int> first_success_slot;  // set when scanning stopped early
};

// One generation: per parent build a child (rates mutated first, then used
// for its own donor/crossover), evaluate, and replace the parent iff the
// child is strictly fitter. A parent stagnant for 5 generations has its
// rates re-drawn uniformly. Child evaluations run in parallel; selection is
// applied serially in slot order at the barrier.
GenerationOutcome generation_step(Population& pop, const Evaluator& evaluator, Seed seed,
                                  int workers, bool stop_at_first_success = false);

// True iff every member carries the success flag.
bool converged(const Population& pop);

}  // namespace evobed

#endif
