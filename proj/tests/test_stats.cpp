#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "evobed/rng.hpp"
#include "evobed/stats.hpp"

using namespace evobed;

namespace {

// Independent oracle: U from midranks, exact tail by recursive enumeration
// of every n-subset of the pooled values.
double oracle_u(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  auto midrank = [&](double v) {
    double lo = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
    double hi = std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
    return 0.5 * (lo + 1 + hi);  // average of the tied rank block
  };
  double rank_sum = 0.0;
  for (double v : a) rank_sum += midrank(v);
  double n = static_cast<double>(a.size());
  return rank_sum - n * (n + 1) / 2.0;
}

void enumerate_subsets(const std::vector<double>& pooled, std::size_t start,
                       std::vector<double>& chosen, std::size_t n,
                       std::vector<double>& rest_scratch, double u_obs, long& le,
                       long& total) {
  if (chosen.size() == n) {
    (void)rest_scratch;
    // chosen holds values; complement = pooled minus chosen as a multiset.
    std::vector<double> remaining = pooled;
    for (double v : chosen) {
      auto it = std::find(remaining.begin(), remaining.end(), v);
      remaining.erase(it);
    }
    double u = oracle_u(chosen, remaining);
    if (u <= u_obs + 1e-9) ++le;
    ++total;
    return;
  }
  if (start >= pooled.size()) return;
  if (pooled.size() - start < n - chosen.size()) return;
  chosen.push_back(pooled[start]);
  enumerate_subsets(pooled, start + 1, chosen, n, rest_scratch, u_obs, le, total);
  chosen.pop_back();
  enumerate_subsets(pooled, start + 1, chosen, n, rest_scratch, u_obs, le, total);
}

double oracle_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  double u_obs = oracle_u(a, b);
  long le = 0, total = 0;
  std::vector<double> chosen, scratch;
  enumerate_subsets(pooled, 0, chosen, a.size(), scratch, u_obs, le, total);
  return static_cast<double>(le) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("fully separated samples give U = 0 and exact p = 0.05") {
  std::vector<double> a{1, 2, 3};
  std::vector<double> b{4, 5, 6};
  MannWhitneyResult r = mann_whitney_u(a, b);
  CHECK(r.u == 0.0);
  CHECK(r.exact);
  CHECK(r.p_one_sided == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("identical samples give U = nm/2") {
  std::vector<double> a{2, 2, 2, 2};
  std::vector<double> b{2, 2, 2};
  MannWhitneyResult r = mann_whitney_u(a, b);
  CHECK(r.u == 6.0);
  CHECK(r.degenerate);
  CHECK(r.p_one_sided == 0.5);
}

TEST_CASE("swapping the samples maps U to nm - U") {
  Rng rng(Seed{17}.value);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    int n = 2 + static_cast<int>(rng.uniform_index(6));
    int m = 2 + static_cast<int>(rng.uniform_index(6));
    for (int i = 0; i < n; ++i) a.push_back(static_cast<double>(rng.uniform_index(8)));
    for (int i = 0; i < m; ++i) b.push_back(static_cast<double>(rng.uniform_index(8)));
    double u_ab = mann_whitney_u(a, b).u;
    double u_ba = mann_whitney_u(b, a).u;
    CHECK(u_ab + u_ba == doctest::Approx(n * m).epsilon(1e-12));
  }
}

TEST_CASE("exact mode matches the enumeration oracle for all n, m <= 6") {
  Rng rng(Seed{23}.value);
  for (int n = 1; n <= 6; ++n) {
    for (int m = 1; m <= 6; ++m) {
      for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < n; ++i)
          a.push_back(static_cast<double>(rng.uniform_index(6)));
        for (int i = 0; i < m; ++i)
          b.push_back(static_cast<double>(rng.uniform_index(6)));
        MannWhitneyResult r = mann_whitney_u(a, b);
        CHECK(r.exact);
        CHECK(r.u == doctest::Approx(oracle_u(a, b)).epsilon(1e-12));
        if (!r.degenerate)
          CHECK(r.p_one_sided == doctest::Approx(oracle_exact_p(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("normal approximation engages on large samples and orders correctly") {
  std::vector<double> low, high;
  Rng rng(Seed{31}.value);
  for (int i = 0; i < 30; ++i) {
    low.push_back(rng.uniform(0.0, 1.0));
    high.push_back(rng.uniform(2.0, 3.0));
  }
  MannWhitneyResult r = mann_whitney_u(low, high);
  CHECK_FALSE(r.exact);
  CHECK(r.p_one_sided < 1e-6);
  MannWhitneyResult opposite = mann_whitney_u(high, low);
  CHECK(opposite.p_one_sided > 0.999);
}

TEST_CASE("empty samples are rejected") {
  std::vector<double> a{1.0};
  std::vector<double> empty;
  CHECK_THROWS_AS(mann_whitney_u(a, empty), std::invalid_argument);
}

TEST_CASE("median of odd and even sized samples") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}
