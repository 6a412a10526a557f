#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "ring_march/analysis.hpp"
#include "ring_march/experiments.hpp"
#include "ring_march/grid_io.hpp"
#include "ring_march/oracle.hpp"
#include "ring_march/step.hpp"
#include "ring_march/verify.hpp"

namespace {

using namespace ring_march;

std::vector<std::string> split_lines(const std::string& grid_arg) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = grid_arg.find(',', pos);
    if (comma == std::string::npos) {
      lines.push_back(grid_arg.substr(pos));
      return lines;
    }
    lines.push_back(grid_arg.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

void check_probability(const char* flag, double value) {
  if (value < 0.0 || value > 1.0)
    throw_error(Errc::bad_config, std::string(flag) + " must lie in [0,1]");
}

SwitchPolicy parse_policy(const std::string& name, double q) {
  if (name == "never") return SwitchPolicy::never();
  if (name == "eager") return SwitchPolicy::eager();
  if (name == "probabilistic") {
    check_probability("--q", q);
    return SwitchPolicy::probabilistic(q);
  }
  throw_error(Errc::bad_config, "policy must be never|eager|probabilistic");
}

int cmd_run(int n, int k, const std::string& init, const std::string& grid,
            int m, std::uint64_t seed, const std::string& mode,
            const std::string& policy, double q, double r, double p,
            bool guard, std::int64_t max_steps, const std::string& trace_path) {
  check_probability("--r", r);
  check_probability("--p", p);
  ModelParams params{.rest_probability = r,
                     .erratic_probability = p,
                     .policy = parse_policy(policy, q),
                     .guard_min_two_per_track = guard};
  RngStream rng(seed);
  Configuration config(3, 1);
  if (init == "explicit") {
    if (grid.empty()) throw_error(Errc::bad_config, "--init explicit needs --grid");
    config = parse_lines(split_lines(grid));
  } else if (init == "dense") {
    config = gen_dense(n, k, rng);
  } else if (init == "sparse") {
    config = gen_sparse(n, k, rng);
  } else if (init == "two_segment") {
    config = gen_two_segment(n, m);
  } else {
    throw_error(Errc::bad_config, "init must be explicit|dense|sparse|two_segment");
  }
  validate(config, params);

  std::string trace;
  RunOptions options;
  if (!trace_path.empty()) {
    trace = render_text(config) + "\n";
    options.on_step = [&trace](const Configuration&, const StepReport&,
                               const Configuration& after) {
      trace += render_text(after) + "\n";
    };
  }
  if (mode != "local" && mode != "global")
    throw_error(Errc::bad_config, "mode must be local|global");
  const StabilityMode stability =
      mode == "global" ? StabilityMode::global : StabilityMode::local;
  const RunResult result =
      run_until_stable(std::move(config), rng, params, stability, max_steps,
                       options);
  if (!trace_path.empty()) write_file(trace_path, trace);
  if (result.t_stable) {
    std::cout << "t_stable=" << *result.t_stable << "\n";
    std::cout << "conflicts=" << result.total_conflicts << "\n";
    return 0;
  }
  std::cout << "timeout after " << max_steps << " steps\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path) {
  const ExperimentSpec spec = load_run_config_file(config_path);
  const ExperimentResult result = monte_carlo(spec);
  SweepRow row{.sweep = "experiment",
               .point = 1,
               .n = spec.n,
               .k = spec.k,
               .m = spec.init.kind == InitSpec::Kind::explicit_config
                        ? spec.init.config->locust_count()
                        : (spec.init.kind == InitSpec::Kind::two_segment
                               ? spec.init.m
                               : static_cast<int>(spec.init.density * spec.n *
                                                  spec.k)),
               .density = spec.init.kind == InitSpec::Kind::dense ? "dense"
                          : spec.init.kind == InitSpec::Kind::sparse
                              ? "sparse"
                          : spec.init.kind == InitSpec::Kind::two_segment
                              ? "two_segment"
                              : "explicit",
               .policy = spec.params.policy.kind == SwitchPolicy::Kind::never
                             ? "never"
                         : spec.params.policy.kind == SwitchPolicy::Kind::eager
                             ? "eager"
                             : "probabilistic",
               .q = spec.params.policy.kind == SwitchPolicy::Kind::probabilistic
                        ? std::optional<double>(spec.params.policy.q)
                        : std::nullopt,
               .p = spec.params.erratic_probability,
               .r = spec.params.rest_probability,
               .mode = spec.mode == StabilityMode::local ? "local" : "global",
               .trials = spec.trials,
               .seed = spec.base_seed,
               .mean_t_stable = std::nullopt,
               .stderr_t_stable = std::nullopt,
               .timeouts = result.timeouts};
  if (result.completed > 0) {
    row.mean_t_stable = result.mean_t_stable;
    row.stderr_t_stable = result.stderr_t_stable;
  }
  write_csv({row}, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& column, const std::string& density,
              const std::string& policy, double q, int trials,
              std::uint64_t seed, std::int64_t max_steps,
              const std::string& out_path) {
  if (column.size() != 1 || (column != "a" && column != "b" && column != "c"))
    throw_error(Errc::bad_config, "sweep column must be a, b or c");
  const InitSpec::Kind kind =
      density == "dense" ? InitSpec::Kind::dense : InitSpec::Kind::sparse;
  if (density != "dense" && density != "sparse")
    throw_error(Errc::bad_config, "density must be dense|sparse");
  const auto rows = sweep_fig4(column[0], kind, parse_policy(policy, q),
                               trials, seed, max_steps);
  write_csv(rows, out_path);
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return 0;
}

int cmd_oracle(const std::string& grid, std::int64_t cap) {
  const Configuration start = parse_lines(split_lines(grid));
  const OracleResult result =
      exact_expected_stabilization(start, OracleOptions{.state_cap = cap});
  std::cout << "expected_t_stable=" << format_double(result.expected_t_stable)
            << "\n";
  std::cout << "state_count=" << result.state_count << "\n";
  return 0;
}

void print_suite(const SuiteResult& suite) {
  std::cout << (suite.passed() ? "[PASS] " : "[FAIL] ") << suite.name << ": "
            << suite.checks << " checks, " << suite.violations
            << " violations\n";
  for (const std::string& failure : suite.failures)
    std::cout << "       " << failure << "\n";
}

int cmd_verify(const std::string& suite, int runs, int trials,
               std::uint64_t seed) {
  std::vector<SuiteResult> results;
  if (suite == "all" || suite == "structural") {
    StructuralSuiteOptions options;
    options.runs = runs;
    options.seed = seed;
    results.push_back(run_structural_suite(options));
  }
  if (suite == "all" || suite == "oracle")
    results.push_back(run_oracle_consistency_suite(5, 3, 100000, seed));
  if (suite == "all" || suite == "theorem1")
    results.push_back(run_theorem_bound_suite(50, trials, seed));
  if (results.empty())
    throw_error(Errc::bad_config, "suite must be all|structural|oracle|theorem1");
  bool ok = true;
  for (const SuiteResult& result : results) {
    print_suite(result);
    ok = ok && result.passed();
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seedable simulator and analysis toolkit for collective "
               "marching on a k-track ring cylinder"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one trial and print t_stable");
  int n = 8, k = 1, m = 0;
  std::string init = "explicit", grid, mode = "local", policy = "never";
  std::uint64_t seed = 0;
  double q = 0.0, r = 0.0, p = 0.0;
  bool guard = true;
  std::int64_t max_steps = 1'000'000;
  std::string trace_path;
  run->add_option("--n", n, "ring length");
  run->add_option("--k", k, "track count");
  run->add_option("--init", init, "explicit|dense|sparse|two_segment");
  run->add_option("--grid", grid, "comma-separated grid lines, top track first");
  run->add_option("--m", m, "locust count for two_segment");
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--mode", mode, "local|global");
  run->add_option("--policy", policy, "never|eager|probabilistic");
  run->add_option("--q", q, "probabilistic switch probability");
  run->add_option("--r", r, "erratic rest probability");
  run->add_option("--p", p, "erratic vertical probability");
  run->add_flag("--guard,!--no-guard", guard, "keep >= 2 locusts per track");
  run->add_option("--max-steps", max_steps, "step budget");
  run->add_option("--trace", trace_path, "write an ASCII grid per step");

  // experiment
  auto* experiment =
      app.add_subcommand("experiment", "Run a JSON experiment spec to CSV");
  std::string config_path, out_path = "experiment.csv";
  experiment->add_option("--config", config_path, "JSON run config")->required();
  experiment->add_option("--out", out_path, "output CSV path")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Simulation sweep presets to CSV");
  std::string column, density = "sparse", sweep_policy = "eager";
  int trials = 1000;
  std::uint64_t sweep_seed = 1;
  std::string sweep_out = "sweep.csv";
  std::int64_t sweep_max_steps = 1'000'000;
  double sweep_q = 0.0;
  sweep->add_option("column", column, "a|b|c")->required();
  sweep->add_option("--density", density, "dense|sparse");
  sweep->add_option("--policy", sweep_policy, "never|eager|probabilistic");
  sweep->add_option("--q", sweep_q, "probabilistic switch probability");
  sweep->add_option("--trials", trials, "trials per point");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--max-steps", sweep_max_steps, "step budget per trial");
  sweep->add_option("--out", sweep_out, "output CSV path")->required();

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Exact expected stabilization time of a tiny k=1 instance");
  std::string oracle_grid;
  std::int64_t cap = 100000;
  int oracle_n = 0, oracle_m = 0;
  oracle->add_option("--grid", oracle_grid, "single-track grid line")->required();
  oracle->add_option("--n", oracle_n, "ring length (cross-checked)");
  oracle->add_option("--m", oracle_m, "locust count (cross-checked)");
  oracle->add_option("--cap", cap, "state space cap");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the property suites");
  std::string suite = "all";
  int verify_runs = 1000, verify_trials = 1000;
  std::uint64_t verify_seed = 20240901;
  verify->add_option("--suite", suite, "all|structural|oracle|theorem1");
  verify->add_option("--runs", verify_runs, "structural suite run count");
  verify->add_option("--trials", verify_trials, "trials per bound instance");
  verify->add_option("--seed", verify_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the offending flag
    return 1;
  }

  try {
    if (run->parsed())
      return cmd_run(n, k, init, grid, m, seed, mode, policy, q, r, p, guard,
                     max_steps, trace_path);
    if (experiment->parsed()) return cmd_experiment(config_path, out_path);
    if (sweep->parsed())
      return cmd_sweep(column, density, sweep_policy, sweep_q, trials,
                       sweep_seed, sweep_max_steps, sweep_out);
    if (oracle->parsed()) {
      const Configuration start = parse_lines(split_lines(oracle_grid));
      if (oracle_n > 0 && start.ring_length() != oracle_n)
        throw_error(Errc::bad_config, "--n disagrees with the grid");
      if (oracle_m > 0 && start.locust_count() != oracle_m)
        throw_error(Errc::bad_config, "--m disagrees with the grid");
      return cmd_oracle(oracle_grid, cap);
    }
    if (verify->parsed())
      return cmd_verify(suite, verify_runs, verify_trials, verify_seed);
  } catch (const ModelError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
