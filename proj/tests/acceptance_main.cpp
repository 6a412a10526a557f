// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs everything with fixed seeds so results are reproducible.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ring_march/analysis.hpp"
#include "ring_march/experiments.hpp"
#include "ring_march/grid_io.hpp"
#include "ring_march/oracle.hpp"
#include "ring_march/step.hpp"
#include "ring_march/verify.hpp"

using namespace ring_march;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1. Monte Carlo agreement with the exact oracle on random tiny instances.
void criterion_exact_oracle() {
  RngStream pick(8101);
  int checked = 0;
  bool pass = true;
  std::string detail;
  while (checked < 10) {
    const int n = 3 + static_cast<int>(pick.pick(4));          // 3..6
    const int max_m = std::min(4, n);
    const int m = 2 + static_cast<int>(pick.pick(
                          static_cast<std::uint32_t>(max_m - 1)));  // 2..max
    Configuration start(n, 1);
    {
      RngStream gen(pick.next_u64());
      start = gen_uniform_random(n, 1, m, gen);
    }
    if (is_globally_stable(start)) continue;  // want informative instances
    ++checked;
    const double exact = exact_expected_stabilization(start).expected_t_stable;
    ExperimentSpec spec{.n = n,
                        .k = 1,
                        .init = InitSpec::explicit_config(start),
                        .params = ModelParams{},
                        .mode = StabilityMode::local,
                        .trials = 100000,
                        .base_seed = 910000 + static_cast<std::uint64_t>(checked),
                        .max_steps = 1'000'000};
    const ExperimentResult mc = monte_carlo(spec);
    const double gap = std::fabs(mc.mean_t_stable - exact);
    const bool ok =
        mc.timeouts == 0 && gap <= 3.0 * mc.stderr_t_stable;
    if (!ok || detail.empty())
      detail = "n=" + std::to_string(n) + " m=" + std::to_string(m) +
               " exact=" + fmt(exact) + " mc=" + fmt(mc.mean_t_stable) +
               " se=" + fmt(mc.stderr_t_stable);
    pass = pass && ok;
  }
  report(1, "exact-oracle agreement (10 instances, 1e5 trials)", pass, detail);
}

// 2. Two-segment ruin: mean conflicts = (m/2)^2 and travel-time floor.
void criterion_gamblers_ruin() {
  const int n = 20, m = 10;
  ExperimentSpec spec{.n = n,
                      .k = 1,
                      .init = InitSpec::two_segment(m),
                      .params = ModelParams{},
                      .mode = StabilityMode::local,
                      .trials = 10000,
                      .base_seed = 8202,
                      .max_steps = 1'000'000};
  const ExperimentResult mc = monte_carlo(spec);
  const double expected =
      static_cast<double>(gamblers_ruin_expected(m / 2, m / 2));
  const bool conflicts_ok =
      std::fabs(mc.mean_conflicts - expected) <= 3.0 * mc.stderr_conflicts;
  const bool travel_ok = mc.mean_t_stable >= (n - m) / 2.0;
  report(2, "two-segment ruin: 25 conflicts and travel-time floor",
         conflicts_ok && travel_ok && mc.timeouts == 0,
         "conflicts=" + fmt(mc.mean_conflicts) + " se=" +
             fmt(mc.stderr_conflicts) + " t=" + fmt(mc.mean_t_stable));
}

// 3. Upper bound m^2 + 2(n-m) over 50 random single-track instances.
void criterion_upper_bound() {
  RngStream pick(8303);
  std::vector<std::pair<int, int>> samples;
  while (samples.size() < 50) {
    const int n = 4 + static_cast<int>(pick.pick(17));  // 4..20
    const int m = 2 + static_cast<int>(
                          pick.pick(static_cast<std::uint32_t>(n - 2)));
    samples.emplace_back(n, m);
  }
  const auto checks = check_theorem1_bound(samples, 1000, 8304);
  int violations = 0;
  double min_margin = 1e9;
  for (const BoundCheck& check : checks) {
    if (!check.within) ++violations;
    min_margin = std::min(
        min_margin, check.bound - (check.mean + 3.0 * check.stderr_of_mean));
  }
  report(3, "stabilization bound m^2 + 2(n-m) on 50 random instances",
         violations == 0,
         "violations=" + std::to_string(violations) +
             " tightest margin=" + fmt(min_margin));
}

// 4. Sparse 30x30 endpoint: eager ~13.5, never ~25, separated CIs.
void criterion_column_a_endpoint() {
  auto run = [](SwitchPolicy policy, std::uint64_t seed) {
    ExperimentSpec spec{.n = 30,
                        .k = 30,
                        .init = InitSpec::sparse(),
                        .params = ModelParams{.policy = policy,
                                              .guard_min_two_per_track = false},
                        .mode = StabilityMode::local,
                        .trials = 1000,
                        .base_seed = seed,
                        .max_steps = 1'000'000};
    return monte_carlo(spec);
  };
  const ExperimentResult eager = run(SwitchPolicy::eager(), 8404);
  const ExperimentResult never = run(SwitchPolicy::never(), 8405);
  const bool eager_ok = std::fabs(eager.mean_t_stable - 13.5) <= 0.20 * 13.5;
  const bool never_ok = std::fabs(never.mean_t_stable - 25.0) <= 0.20 * 25.0;
  const bool separated =
      eager.mean_t_stable + 1.96 * eager.stderr_t_stable <
      never.mean_t_stable - 1.96 * never.stderr_t_stable;
  report(4, "track-switching endpoint: eager 13.5 vs never 25 (+/-20%)",
         eager_ok && never_ok && separated &&
             eager.timeouts + never.timeouts == 0,
         "eager=" + fmt(eager.mean_t_stable) + " never=" +
             fmt(never.mean_t_stable));
}

// 5. Global-consensus regressions at p = 0.02 and monotonicity in p.
void criterion_column_c_points() {
  struct Regime {
    InitSpec::Kind density;
    SwitchPolicy policy;
    double target;
    const char* label;
  };
  const Regime regimes[] = {
      {InitSpec::Kind::sparse, SwitchPolicy::eager(), 1974.0, "sparse/eager"},
      {InitSpec::Kind::dense, SwitchPolicy::eager(), 669.0, "dense/eager"},
      {InitSpec::Kind::sparse, SwitchPolicy::never(), 232.0, "sparse/never"},
  };
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 8505;
  for (const Regime& regime : regimes) {
    auto run_at = [&](double p) {
      ExperimentSpec spec{
          .n = 30,
          .k = 5,
          .init = regime.density == InitSpec::Kind::dense ? InitSpec::dense()
                                                          : InitSpec::sparse(),
          .params = ModelParams{.rest_probability = 0.0,
                                .erratic_probability = p,
                                .policy = regime.policy,
                                .guard_min_two_per_track = false},
          .mode = StabilityMode::global,
          .trials = 500,
          .base_seed = seed++ * 100000,
          .max_steps = 1'000'000};
      return monte_carlo(spec);
    };
    const ExperimentResult at_002 = run_at(0.02);
    const ExperimentResult at_01 = run_at(0.1);
    const ExperimentResult at_04 = run_at(0.4);
    // Means are over completed trials; rare timeouts near p -> 0 are
    // reported, never silently dropped.
    const bool target_ok =
        at_002.completed > 0 &&
        std::fabs(at_002.mean_t_stable - regime.target) <= 0.25 * regime.target;
    const bool monotone = at_002.mean_t_stable > at_01.mean_t_stable &&
                          at_01.mean_t_stable > at_04.mean_t_stable;
    pass = pass && target_ok && monotone;
    detail += std::string(regime.label) + "=" + fmt(at_002.mean_t_stable) +
              " (target " + fmt(regime.target) + ", timeouts " +
              std::to_string(at_002.timeouts) + ", mono " +
              (monotone ? "y" : "N") + ") ";
  }
  report(5, "erratic global consensus at p=0.02 (+/-25%) and p-monotonicity",
         pass, detail);
}

// 6. Max of k absorbing walks scales no faster than n^2 log k.
void criterion_multi_walk_scaling() {
  const int n = 10;
  RngStream rng(8606);
  bool pass = true;
  std::string detail;
  double max_ratio = 0.0;
  for (const int k : {1, 2, 4, 8, 16, 32, 64}) {
    const WalkStats stats =
        multi_walk_max_absorption(k, n, n, 10000, rng);
    if (k == 1) {
      const bool closed_form_ok =
          std::fabs(stats.mean - n * n) <= 3.0 * stats.stderr_of_mean;
      pass = pass && closed_form_ok;
      detail += "k1=" + fmt(stats.mean) + " ";
    }
    const double ratio =
        stats.mean / (n * n * (1.0 + std::log(static_cast<double>(k))));
    max_ratio = std::max(max_ratio, ratio);
  }
  pass = pass && max_ratio <= 2.0;
  report(6, "multi-walk absorption: closed form at k=1, log-k scaling", pass,
         detail + "max ratio=" + fmt(max_ratio));
}

// 7. Structural property suite at full scale. The strict-L-decrease clause
// is asserted exactly as stated even though the underlying claim is provably
// false for this model (see the suite breakdown): once the innermost heads
// are adjacent (L3 = 1, a conflict running every step), the rear gaps can
// shift in lockstep and L stalls. Every other property holds everywhere.
void criterion_structural_suite() {
  StructuralSuiteOptions options;
  options.runs = 1000;
  options.seed = 8707;
  const SuiteResult result = run_structural_suite(options);
  std::string breakdown;
  for (const auto& [category, count] : result.by_category)
    breakdown += " " + category + "=" + std::to_string(count);
  if (breakdown.empty()) breakdown = " none";
  const std::int64_t off_known = result.violations_outside("L-strict-decrease");
  report(7, "structural properties over 1000 random runs",
         result.violations == 0,
         std::to_string(result.checks) + " checks; violations by kind:" +
             breakdown + "; outside the known L-stall defect: " +
             std::to_string(off_known));
}

// 8. Erratic behaviour reaches global consensus in every run.
void criterion_global_reachability() {
  ExperimentSpec spec{
      .n = 10,
      .k = 3,
      .init = InitSpec::sparse(),
      .params = ModelParams{.rest_probability = 0.1,
                            .erratic_probability = 0.1,
                            .policy = SwitchPolicy::eager(),
                            .guard_min_two_per_track = false},
      .mode = StabilityMode::global,
      .trials = 100,
      .base_seed = 8808,
      .max_steps = 1'000'000};
  const ExperimentResult mc = monte_carlo(spec);
  report(8, "global consensus reached in 100/100 erratic runs",
         mc.timeouts == 0,
         "timeouts=" + std::to_string(mc.timeouts) + " mean=" +
             fmt(mc.mean_t_stable));
}

// 9. Byte-identical CSV/trace across reruns and worker counts; trace replay.
void criterion_determinism() {
  auto sweep_bytes = [] {
    return csv_text(sweep_fig4('c', InitSpec::Kind::sparse,
                               SwitchPolicy::eager(), 20, 8909, 200000));
  };
  setenv("RING_MARCH_THREADS", "1", 1);
  const std::string serial = sweep_bytes();
  setenv("RING_MARCH_THREADS", "8", 1);
  const std::string parallel = sweep_bytes();
  unsetenv("RING_MARCH_THREADS");
  const std::string again = sweep_bytes();
  const bool csv_ok = serial == parallel && serial == again;

  // Trace determinism and replay.
  auto run_traced = [](std::string* trace_out) {
    RngStream rng(8910);
    ModelParams params{.rest_probability = 0.05,
                       .erratic_probability = 0.05,
                       .policy = SwitchPolicy::eager(),
                       .guard_min_two_per_track = true};
    RngStream gen(4242);
    Configuration initial = gen_sparse(12, 3, gen);
    std::string trace = render_text(initial) + "\n";
    RunOptions options;
    options.retain_reports = true;
    options.on_step = [&trace](const Configuration&, const StepReport&,
                               const Configuration& after) {
      trace += render_text(after) + "\n";
    };
    RunResult result = run_until_stable(std::move(initial), rng, params,
                                        StabilityMode::global, 100000, options);
    *trace_out = trace;
    return result;
  };
  std::string trace_a, trace_b;
  const RunResult run_a = run_traced(&trace_a);
  const RunResult run_b = run_traced(&trace_b);
  const bool trace_ok = trace_a == trace_b && run_a.t_stable.has_value();

  bool replay_ok = false;
  if (run_a.t_stable) {
    const auto blocks = parse_trace(trace_a);
    const Configuration last = parse(blocks.back());
    RngStream gen(4242);
    const Configuration initial = gen_sparse(12, 3, gen);
    const Configuration replayed = replay(initial, *run_a.reports);
    replay_ok = blocks.size() ==
                    static_cast<std::size_t>(*run_a.t_stable) + 1 &&
                render(last) == render(run_a.final) &&
                replayed == run_a.final;
  }
  report(9, "determinism across workers and trace replay",
         csv_ok && trace_ok && replay_ok,
         std::string("csv=") + (csv_ok ? "identical" : "DIFFERS") +
             " trace=" + (trace_ok ? "identical" : "DIFFERS") + " replay=" +
             (replay_ok ? "exact" : "BROKEN"));
}

}  // namespace

int main() {
  criterion_exact_oracle();
  criterion_gamblers_ruin();
  criterion_upper_bound();
  criterion_column_a_endpoint();
  criterion_column_c_points();
  criterion_multi_walk_scaling();
  criterion_structural_suite();
  criterion_global_reachability();
  criterion_determinism();
  std::printf("%s: %d/9 criteria passed\n", failures == 0 ? "OK" : "FAILED",
              9 - failures);
  if (failures > 0)
    std::printf("note: the failing clauses are reproducible model findings "
                "(L-potential stalls at head contact; non-monotone never-"
                "switch p-curve) — see README, \"Known model findings\".\n");
  return failures == 0 ? 0 : 1;
}
