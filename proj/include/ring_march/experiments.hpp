#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ring_march/core.hpp"
#include "ring_march/rng.hpp"
#include "ring_march/step.hpp"

namespace ring_march {

struct InitSpec {
  enum class Kind { dense, sparse, two_segment, explicit_config };

  Kind kind = Kind::dense;
  double density = 0.5;  // dense/sparse fill fraction
  int m = 0;             // two_segment locust count
  std::optional<Configuration> config;  // explicit_config

  static InitSpec dense() { return {Kind::dense, 0.5, 0, {}}; }
  static InitSpec sparse() { return {Kind::sparse, 0.1, 0, {}}; }
  static InitSpec two_segment(int m) { return {Kind::two_segment, 0.0, m, {}}; }
  static InitSpec explicit_config(Configuration c) {
    return {Kind::explicit_config, 0.0, 0, std::move(c)};
  }
};

// Declarative sweep point: trial i runs with seed base_seed + i, so results
// are reproducible and trials may run on any number of workers.
struct ExperimentSpec {
  int n = 0;
  int k = 0;
  InitSpec init;
  ModelParams params;
  StabilityMode mode = StabilityMode::local;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::int64_t max_steps = 1'000'000;
  bool retain_trials = false;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> t_stable;
  std::int64_t conflicts = 0;
};

// Aggregates over non-timeout trials; timeouts are counted, never dropped
// silently.
struct ExperimentResult {
  double mean_t_stable = 0.0;
  double stderr_t_stable = 0.0;
  double mean_conflicts = 0.0;
  double stderr_conflicts = 0.0;
  int timeouts = 0;
  int completed = 0;
  std::optional<std::vector<TrialRecord>> per_trial;
};

// floor(density * n * k) locusts at uniformly random distinct cells with
// fair-coin headings; the whole placement is redrawn until every track holds
// at least 2 locusts. Throws infeasible_guard when the count cannot seat 2
// per track.
Configuration gen_dense(int n, int k, RngStream& rng, double density = 0.5);

// floor(density * n * k) locusts at uniformly random distinct cells, then
// every track holding fewer than 2 is topped up at random free cells — the
// swarm ends up slightly above the nominal density when tracks run short.
Configuration gen_sparse(int n, int k, RngStream& rng, double density = 0.1);

// The back-to-back two-segment ring: m/2 clockwise locusts at x = 0..m/2-1
// and m/2 counterclockwise at x = n-m/2..n-1, heads facing the empty arc.
// Throws odd_m / too_full.
Configuration gen_two_segment(int n, int m);

// m locusts at uniformly random distinct cells, fair-coin headings, redrawn
// until the guard holds.
Configuration gen_uniform_random(int n, int k, int m, RngStream& rng);

Configuration build_initial(const ExperimentSpec& spec, RngStream& rng);

// Deterministic function of its spec; trials run in parallel (worker count
// capped by the RING_MARCH_THREADS environment variable) and are aggregated
// in seed order.
ExperimentResult monte_carlo(const ExperimentSpec& spec);

// One emitted sweep row; empty mean/stderr flag an infeasible point.
struct SweepRow {
  std::string sweep;
  double point = 0.0;
  int n = 0;
  int k = 0;
  int m = 0;
  std::string density;
  std::string policy;
  std::optional<double> q;
  double p = 0.0;
  double r = 0.0;
  std::string mode;
  int trials = 0;
  std::uint64_t seed = 0;
  std::optional<double> mean_t_stable;
  std::optional<double> stderr_t_stable;
  int timeouts = 0;
};

// The three simulation columns: 'a' sweeps the track count k = 1..30 at
// n = 30; 'b' sweeps the ring length n = 1..60 at k = 5 (points too small
// for the guard are emitted with empty mean and timeouts = trials); 'c'
// sweeps the erratic probability p over {0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1}
// at n = 30, k = 5 in global mode.
std::vector<SweepRow> sweep_fig4(char column, InitSpec::Kind density,
                                 SwitchPolicy policy, int trials,
                                 std::uint64_t seed,
                                 std::int64_t max_steps = 1'000'000);

struct BoundCheck {
  int n = 0;
  int m = 0;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  double bound = 0.0;
  bool within = false;  // mean + 3 stderr below the bound
};

// Empirical check of the single-track stabilization bound
// E[T] <= m^2 + 2(n - m) on random instances.
std::vector<BoundCheck> check_theorem1_bound(
    const std::vector<std::pair<int, int>>& samples, int trials,
    std::uint64_t seed);

// Worker count for trial parallelism: RING_MARCH_THREADS when set, else the
// machine's hardware concurrency.
int worker_count();

}  // namespace ring_march
