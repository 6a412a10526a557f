#pragma once

#include <cstdint>
#include <vector>

#include "ring_march/core.hpp"
#include "ring_march/rng.hpp"

namespace ring_march {

// Enumerated single-track state space for fixed (n, m): all C(n,m) * 2^m
// placements-with-headings. States are canonically encoded as an occupancy
// bitmask in the low n bits plus one heading bit per occupant (ascending x,
// 1 = clockwise) above them. Absorbing states are exactly the heading-
// uniform ones.
//
// The one-step dynamics here are implemented independently of the step
// engine so that the two can be cross-checked against each other.
class StateSpace {
 public:
  using Encoding = std::uint64_t;

  StateSpace(int ring_length, int locust_count,
             std::int64_t state_cap = 100000);

  int ring_length() const { return n_; }
  int locust_count() const { return m_; }
  std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
  const std::vector<Encoding>& states() const { return states_; }

  Encoding encode(const Configuration& config) const;  // k must be 1
  Configuration decode(Encoding state) const;
  std::int64_t index_of(Encoding state) const;
  bool is_absorbing(std::int64_t index) const;

  // One-step outcome distribution: every joint assignment of the state's
  // conflict and contested-cell coins is equally likely.
  std::vector<std::pair<std::int64_t, double>> successors(
      std::int64_t index) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<Encoding> states_;
};

struct OracleResult {
  double expected_t_stable = 0.0;
  std::int64_t state_count = 0;
};

struct OracleOptions {
  std::int64_t state_cap = 100000;
};

// Exact expected stabilization time of a single-track instance with
// r = p = 0, solved from the first-step linear system over the transient
// states by dense LU. Throws not_single_track / state_space_too_large.
OracleResult exact_expected_stabilization(const Configuration& start,
                                          const OracleOptions& options = {});

// Expected number of conflicts for two deadlocked segments of sizes a and b
// to resolve: a symmetric ruin walk, a * b. Throws nonpositive_size.
std::int64_t gamblers_ruin_expected(std::int64_t a, std::int64_t b);

struct WalkStats {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Simulates k independent symmetric walks with absorbing barriers at 0 and
// 2n from `start`; returns mean and standard error of the per-trial maximum
// absorption time. Throws bad_barriers.
WalkStats multi_walk_max_absorption(int k_walks, int n, int start,
                                    std::int64_t trials, RngStream& rng);

}  // namespace ring_march
