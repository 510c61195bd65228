#include "evobed/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evobed {

namespace {

constexpr int kExactLimit = 12;  // pooled size for exact enumeration

// U statistic of group A against group B: pairs won plus half the ties.
double u_statistic(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) {
      if (x > y)
        u += 1.0;
      else if (x == y)
        u += 0.5;
    }
  return u;
}

// Exact left-tail probability P(U <= u_obs) by enumerating every assignment
// of the pooled values into a group of size n. Handles ties by construction.
double exact_left_tail(const std::vector<double>& pooled, int n, double u_obs) {
  int total = static_cast<int>(pooled.size());
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  // Iterate over combinations via prev_permutation on the descending mask.
  std::vector<double> ga, gb;
  ga.reserve(n);
  gb.reserve(total - n);
  long count_le = 0, count_all = 0;
  do {
    ga.clear();
    gb.clear();
    for (int i = 0; i < total; ++i) (mask[i] ? ga : gb).push_back(pooled[i]);
    double u = u_statistic(std::span<const double>(ga), std::span<const double>(gb));
    if (u <= u_obs + 1e-9) ++count_le;
    ++count_all;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return static_cast<double>(count_le) / static_cast<double>(count_all);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_u requires non-empty samples");

  auto n = static_cast<double>(a.size());
  auto m = static_cast<double>(b.size());

  MannWhitneyResult result;
  result.u = u_statistic(a, b);

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  bool all_same = std::all_of(pooled.begin(), pooled.end(),
                              [&](double v) { return v == pooled.front(); });
  if (all_same) {
    result.degenerate = true;
    result.p_one_sided = 0.5;
    result.exact = pooled.size() <= kExactLimit;
    return result;
  }

  if (pooled.size() <= static_cast<std::size_t>(kExactLimit)) {
    result.exact = true;
    result.p_one_sided = exact_left_tail(pooled, static_cast<int>(a.size()), result.u);
    return result;
  }

  // Tie-corrected normal approximation with continuity correction.
  double big_n = n + m;
  std::sort(pooled.begin(), pooled.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  double var = n * m / 12.0 * (big_n + 1.0 - tie_sum / (big_n * (big_n - 1.0)));
  if (var <= 0.0) {
    result.degenerate = true;
    result.p_one_sided = 0.5;
    return result;
  }
  double z = (result.u + 0.5 - n * m / 2.0) / std::sqrt(var);
  result.p_one_sided = normal_cdf(z);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace evobed
