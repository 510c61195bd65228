#include "evobed/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "evobed/parallel.hpp"

namespace evobed {

namespace {

constexpr std::uint64_t kTagViability = 1;
constexpr std::uint64_t kTagEval = 2;
constexpr std::uint64_t kTagRestart = 3;

GainSet sample_gain_set(Rng& rng) {
  GainSet g;
  for (int d = 0; d < kNumDofs; ++d) {
    double ub = gain_init_upper(static_cast<Dof>(d));
    g.dof[d].kp = rng.uniform_open_low(0.0, ub);
    g.dof[d].ki = rng.uniform_open_low(0.0, ub);
    g.dof[d].kd = rng.uniform_open_low(0.0, ub);
  }
  return g;
}

void pick_three_distinct(Rng& rng, int pop_size, int excluded, int out[3]) {
  for (int k = 0; k < 3; ++k) {
    for (;;) {
      int idx = static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(pop_size)));
      if (idx == excluded) continue;
      bool dup = false;
      for (int j = 0; j < k; ++j) dup = dup || out[j] == idx;
      if (!dup) {
        out[k] = idx;
        break;
      }
    }
  }
}

}  // namespace

Population bootstrap_population(int size, int attempt_budget, const ViabilityTest& viable,
                                Seed seed, int* attempts_out) {
  Population pop;
  pop.members.reserve(size);
  int attempts = 0;
  while (static_cast<int>(pop.members.size()) < size) {
    if (attempts >= attempt_budget) {
      if (attempts_out) *attempts_out = attempts;
      throw BootstrapExhausted(attempt_budget);
    }
    Seed candidate_seed = seed.child(attempts);
    ++attempts;
    Rng rng = candidate_seed.rng();
    GainSet gains = sample_gain_set(rng);
    if (!viable(gains, candidate_seed.child(kTagViability))) continue;
    Individual ind;
    ind.gains = gains;
    ind.cr = rng.uniform(kCrLow, kCrHigh);
    ind.f = rng.uniform(kFLow, kFHigh);
    pop.members.push_back(ind);
  }
  if (attempts_out) *attempts_out = attempts;
  return pop;
}

GainSet donor_vector(const GainSet& r1, const GainSet& r2, const GainSet& r3, double f) {
  auto a1 = r1.to_array(), a2 = r2.to_array(), a3 = r3.to_array();
  std::array<double, 18> v;
  for (int i = 0; i < 18; ++i) v[i] = a3[i] + f * (a1[i] - a2[i]);
  return GainSet::from_array(v);
}

GainSet crossover(const GainSet& parent, const GainSet& donor, double cr, Rng& rng) {
  auto p = parent.to_array();
  auto v = donor.to_array();
  int forced = static_cast<int>(rng.uniform_index(18));
  std::array<double, 18> c;
  for (int i = 0; i < 18; ++i)
    c[i] = (i == forced || rng.uniform() < cr) ? v[i] : p[i];
  return GainSet::from_array(c);
}

std::pair<double, double> mutate_rates_with(double cr, double f, double z_cr, double z_f) {
  double cr2 = std::clamp(cr * std::exp(z_cr), kCrLow, kCrHigh);
  double f2 = std::clamp(f * std::exp(z_f), kFLow, kFHigh);
  return {cr2, f2};
}

std::pair<double, double> mutate_rates(double cr, double f, Rng& rng) {
  double z_cr = rng.normal();
  double z_f = rng.normal();
  return mutate_rates_with(cr, f, z_cr, z_f);
}

std::optional<int> evaluate_population(Population& pop, const Evaluator& evaluator,
                                       Seed seed, int workers,
                                       bool stop_at_first_success) {
  int n = static_cast<int>(pop.members.size());
  std::vector<EvalResult> results(n);
  parallel_for(n, workers, [&](int i) {
    results[i] = evaluator(pop.members[i].gains, seed.child(i).child(kTagEval));
  });
  for (int i = 0; i < n; ++i) {
    pop.members[i].fitness = results[i].fitness;
    pop.members[i].success = results[i].success;
    pop.members[i].stagnation = 0;
    if (stop_at_first_success && results[i].success) {
      pop.all_evaluated = true;
      return i;
    }
  }
  pop.all_evaluated = true;
  return std::nullopt;
}

GenerationOutcome generation_step(Population& pop, const Evaluator& evaluator, Seed seed,
                                  int workers, bool stop_at_first_success) {
  if (!pop.all_evaluated)
    throw std::logic_error("generation_step requires an evaluated population");
  int n = static_cast<int>(pop.members.size());

  struct Candidate {
    Individual child;
    Seed restart_seed;
  };
  std::vector<Candidate> candidates(n);

  // Donors are built against the population as it stands at the generation
  // start; selection is applied afterwards, so parallel evaluation matches
  // the serial order exactly.
  parallel_for(n, workers, [&](int i) {
    Seed slot_seed = seed.child(i);
    Rng rng = slot_seed.rng();
    int r[3];
    pick_three_distinct(rng, n, i, r);
    const Individual& parent = pop.members[i];
    auto [cr, f] = mutate_rates(parent.cr, parent.f, rng);
    GainSet donor = donor_vector(pop.members[r[0]].gains, pop.members[r[1]].gains,
                                 pop.members[r[2]].gains, f);
    GainSet genes = clamp_to_sanity(crossover(parent.gains, donor, cr, rng));
    EvalResult eval = evaluator(genes, slot_seed.child(kTagEval));
    Candidate& c = candidates[i];
    c.child.gains = genes;
    c.child.cr = cr;
    c.child.f = f;
    c.child.fitness = eval.fitness;
    c.child.success = eval.success;
    c.child.stagnation = 0;
    c.restart_seed = slot_seed.child(kTagRestart);
  });

  GenerationOutcome out;
  for (int i = 0; i < n; ++i) {
    Individual& parent = pop.members[i];
    Individual& child = candidates[i].child;
    if (child.fitness > parent.fitness) {
      parent = child;
      ++out.replacements;
    } else {
      ++parent.stagnation;
      if (parent.stagnation >= kStagnationRestart) {
        Rng rng = candidates[i].restart_seed.rng();
        parent.cr = rng.uniform(kCrLow, kCrHigh);
        parent.f = rng.uniform(kFLow, kFHigh);
        parent.stagnation = 0;
        ++out.rate_restarts;
      }
    }
    if (stop_at_first_success && pop.members[i].success) {
      out.first_success_slot = i;
      ++pop.generation;
      return out;
    }
  }
  ++pop.generation;
  return out;
}

bool converged(const Population& pop) {
  if (pop.members.empty() || !pop.all_evaluated) return false;
  return std::all_of(pop.members.begin(), pop.members.end(),
                     [](const Individual& i) { return i.success; });
}

}  // namespace evobed
