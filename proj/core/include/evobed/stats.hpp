#ifndef EVOBED_STATS_HPP
#define EVOBED_STATS_HPP

#include <span>
#include <vector>

namespace evobed {

struct MannWhitneyResult {
  double u = 0.0;           // U statistic of sample a (ties counted half)
  double p_one_sided = 1.0; // P(U <= u_observed) under H0; small when a < b
  bool exact = false;       // exact enumeration vs normal approximation
  bool degenerate = false;  // all pooled values identical
};

// Rank-based Mann-Whitney U with tie correction. Exact enumeration over all
// C(n+m, n) group assignments when n+m <= 12, tie-corrected normal
// approximation otherwise. The one-sided p-value is the left tail of U, so
// callers pass the sample expected to be smaller first.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

double median(std::vector<double> values);

}  // namespace evobed

#endif
