#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ring_march/core.hpp"

namespace ring_march {

struct SuiteResult {
  std::string name;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::map<std::string, std::int64_t> by_category;
  std::vector<std::string> failures;  // first few, for diagnostics

  bool passed() const { return violations == 0; }
  std::int64_t violations_outside(const std::string& category) const {
    std::int64_t count = 0;
    for (const auto& [key, value] : by_category)
      if (key != category) count += value;
    return count;
  }
  void fail(const std::string& category, const std::string& message) {
    ++violations;
    ++by_category[category];
    if (failures.size() < 16) failures.push_back(category + ": " + message);
  }
};

struct StructuralSuiteOptions {
  int runs = 1000;
  std::uint64_t seed = 20240901;
  int min_n = 5;
  int max_n = 20;
  int max_k = 6;
  std::int64_t max_steps = 1'000'000;
};

// Random multi-track runs at p = r = 0 (mixed dense/sparse, all switching
// policies), asserted at every step: occupancy consistency; headings change
// only through conflict losses; at most one conflict per locust; stable
// tracks stay stable; per-track segment counts never increase; deadlocked
// compact pairs persist or unify; a track reaching exactly two segments is
// stable or deadlocked within 3d steps; F non-increasing and L strictly
// decreasing on tracked two-segment tracks; recorded moves replay cleanly
// onto the final configuration.
SuiteResult run_structural_suite(const StructuralSuiteOptions& options = {});

// Compares the engine's empirical one-step outcome distribution against the
// oracle's exact kernel on every state of the (n, m) single-track space
// (chi-square, significance 0.001), and checks the absorbing classification
// against global stability.
SuiteResult run_oracle_consistency_suite(int n, int m,
                                         std::int64_t trials_per_state,
                                         std::uint64_t seed);

// Random single-track instances against E[T] <= m^2 + 2(n-m), plus fixed
// multi-track spot checks against 3/2 mn + (pi^2/24) m^2.
SuiteResult run_theorem_bound_suite(int instances, int trials,
                                    std::uint64_t seed);

// Regularized lower incomplete gamma P(a, x); exposed for the chi-square
// p-value computation and its tests.
double gamma_p(double a, double x);

// Upper tail probability of a chi-square statistic with dof degrees of
// freedom.
double chi_square_tail(double statistic, int dof);

}  // namespace ring_march
