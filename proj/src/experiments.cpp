#include "ring_march/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace ring_march {

namespace {

// Uniformly random distinct cells via partial Fisher-Yates over the flat
// cell index space.
Configuration place_uniform(int n, int k, int m, RngStream& rng) {
  std::vector<int> cells(static_cast<std::size_t>(n) * k);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  Configuration config(n, k);
  for (int i = 0; i < m; ++i) {
    const auto j = i + rng.pick(static_cast<std::uint32_t>(cells.size() - i));
    std::swap(cells[i], cells[j]);
    config.add_locust(Coord{cells[i] % n, cells[i] / n},
                      rng.coin() ? Heading::clockwise
                                 : Heading::counterclockwise);
  }
  return config;
}

bool guard_holds(const Configuration& config) {
  for (int y = 0; y < config.track_count(); ++y)
    if (config.track_population(y) < 2) return false;
  return true;
}

double sample_stderr(double sum, double sum_sq, std::int64_t count) {
  if (count < 2) return 0.0;
  const double var = (sum_sq - sum * sum / static_cast<double>(count)) /
                     static_cast<double>(count - 1);
  return std::sqrt(std::max(0.0, var) / static_cast<double>(count));
}

}  // namespace

Configuration gen_uniform_random(int n, int k, int m, RngStream& rng) {
  if (m < 2 * k)
    throw_error(Errc::infeasible_guard,
                std::to_string(m) + " locusts cannot seat 2 on each of " +
                    std::to_string(k) + " tracks");
  if (m > n * k)
    throw_error(Errc::too_full, "more locusts than cells");
  for (;;) {
    Configuration config = place_uniform(n, k, m, rng);
    if (guard_holds(config)) return config;
  }
}

Configuration gen_dense(int n, int k, RngStream& rng, double density) {
  const int m = static_cast<int>(density * n * k);
  return gen_uniform_random(n, k, m, rng);
}

Configuration gen_sparse(int n, int k, RngStream& rng, double density) {
  if (n < 2) throw_error(Errc::infeasible_guard, "track too short to seat 2");
  const int base = static_cast<int>(density * n * k);
  if (base > n * k) throw_error(Errc::too_full, "more locusts than cells");
  // The base fill lands uniformly; tracks that drew fewer than 2 locusts are
  // then topped up, so the swarm holds "slightly more" than the nominal
  // density when k is large relative to the fill.
  Configuration config = place_uniform(n, k, base, rng);
  for (int y = 0; y < k; ++y) {
    while (config.track_population(y) < 2) {
      const int x = static_cast<int>(rng.pick(static_cast<std::uint32_t>(n)));
      if (config.occupied(x, y)) continue;
      config.add_locust(Coord{x, y}, rng.coin() ? Heading::clockwise
                                                : Heading::counterclockwise);
    }
  }
  return config;
}

Configuration gen_two_segment(int n, int m) {
  if (m % 2 != 0) throw_error(Errc::odd_m, "m must be even, got " + std::to_string(m));
  if (m < 2) throw_error(Errc::odd_m, "m must be >= 2");
  if (m >= n) throw_error(Errc::too_full, "need m < n for the empty arc");
  Configuration config(n, 1);
  for (int x = 0; x < m / 2; ++x)
    config.add_locust(Coord{x, 0}, Heading::clockwise);
  for (int x = n - m / 2; x < n; ++x)
    config.add_locust(Coord{x, 0}, Heading::counterclockwise);
  return config;
}

Configuration build_initial(const ExperimentSpec& spec, RngStream& rng) {
  switch (spec.init.kind) {
    case InitSpec::Kind::dense:
      return gen_dense(spec.n, spec.k, rng, spec.init.density);
    case InitSpec::Kind::sparse:
      return gen_sparse(spec.n, spec.k, rng, spec.init.density);
    case InitSpec::Kind::two_segment:
      return gen_two_segment(spec.n, spec.init.m);
    case InitSpec::Kind::explicit_config:
      if (!spec.init.config)
        throw_error(Errc::bad_config, "explicit init without a configuration");
      return *spec.init.config;
  }
  throw_error(Errc::bad_config, "unknown init kind");
}

int worker_count() {
  if (const char* env = std::getenv("RING_MARCH_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentResult monte_carlo(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw_error(Errc::bad_config, "trials must be >= 1");
  std::vector<TrialRecord> records(spec.trials);

  auto run_trial = [&](int index) {
    RngStream rng(spec.base_seed + static_cast<std::uint64_t>(index));
    Configuration initial = build_initial(spec, rng);
    RunResult run = run_until_stable(std::move(initial), rng, spec.params,
                                     spec.mode, spec.max_steps);
    records[index] = TrialRecord{rng.seed(), run.t_stable, run.total_conflicts};
  };

  const int workers = std::min(worker_count(), spec.trials);
  if (workers <= 1) {
    for (int i = 0; i < spec.trials; ++i) run_trial(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (;;) {
            const int i = next.fetch_add(1);
            if (i >= spec.trials) return;
            run_trial(i);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Aggregation walks records in seed order, so the worker count never
  // changes the result.
  ExperimentResult result;
  double sum_t = 0.0, sum_t_sq = 0.0, sum_c = 0.0, sum_c_sq = 0.0;
  for (const TrialRecord& rec : records) {
    if (!rec.t_stable) {
      ++result.timeouts;
      continue;
    }
    ++result.completed;
    const double t = static_cast<double>(*rec.t_stable);
    const double c = static_cast<double>(rec.conflicts);
    sum_t += t;
    sum_t_sq += t * t;
    sum_c += c;
    sum_c_sq += c * c;
  }
  if (result.completed > 0) {
    result.mean_t_stable = sum_t / result.completed;
    result.mean_conflicts = sum_c / result.completed;
    result.stderr_t_stable = sample_stderr(sum_t, sum_t_sq, result.completed);
    result.stderr_conflicts = sample_stderr(sum_c, sum_c_sq, result.completed);
  }
  if (spec.retain_trials) result.per_trial = std::move(records);
  return result;
}

namespace {

const char* kind_name(InitSpec::Kind kind) {
  switch (kind) {
    case InitSpec::Kind::dense: return "dense";
    case InitSpec::Kind::sparse: return "sparse";
    case InitSpec::Kind::two_segment: return "two_segment";
    case InitSpec::Kind::explicit_config: return "explicit";
  }
  return "?";
}

const char* policy_name(SwitchPolicy policy) {
  switch (policy.kind) {
    case SwitchPolicy::Kind::never: return "never";
    case SwitchPolicy::Kind::eager: return "eager";
    case SwitchPolicy::Kind::probabilistic: return "probabilistic";
  }
  return "?";
}

int planned_m(InitSpec::Kind kind, int n, int k) {
  return kind == InitSpec::Kind::dense ? n * k / 2
                                       : std::max(n * k / 10, 2 * k);
}

SweepRow run_point(const std::string& sweep, double point, int n, int k,
                   InitSpec::Kind density, SwitchPolicy policy, double p,
                   StabilityMode mode, int trials, std::uint64_t seed,
                   std::int64_t max_steps) {
  SweepRow row{.sweep = sweep,
               .point = point,
               .n = n,
               .k = k,
               .m = planned_m(density, n, k),
               .density = kind_name(density),
               .policy = policy_name(policy),
               .q = policy.kind == SwitchPolicy::Kind::probabilistic
                        ? std::optional<double>(policy.q)
                        : std::nullopt,
               .p = p,
               .r = 0.0,
               .mode = mode == StabilityMode::local ? "local" : "global",
               .trials = trials,
               .seed = seed,
               .mean_t_stable = std::nullopt,
               .stderr_t_stable = std::nullopt,
               .timeouts = trials};
  // Figure-reproduction regime: generators still seat 2 locusts on every
  // track, but the dynamics run unguarded — the published curves come from
  // runs where locusts may leave a two-locust track.
  ExperimentSpec spec{
      .n = n,
      .k = k,
      .init = density == InitSpec::Kind::dense ? InitSpec::dense()
                                               : InitSpec::sparse(),
      .params = ModelParams{.rest_probability = 0.0,
                            .erratic_probability = p,
                            .policy = policy,
                            .guard_min_two_per_track = false},
      .mode = mode,
      .trials = trials,
      .base_seed = seed,
      .max_steps = max_steps};
  try {
    // Probe feasibility once before burning trials on it.
    RngStream probe(seed);
    validate(build_initial(spec, probe), spec.params);
  } catch (const ModelError&) {
    return row;  // infeasible point: empty mean, timeouts = trials
  }
  const ExperimentResult result = monte_carlo(spec);
  row.timeouts = result.timeouts;
  if (result.completed > 0) {
    row.mean_t_stable = result.mean_t_stable;
    row.stderr_t_stable = result.stderr_t_stable;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_fig4(char column, InitSpec::Kind density,
                                 SwitchPolicy policy, int trials,
                                 std::uint64_t seed, std::int64_t max_steps) {
  std::vector<SweepRow> rows;
  const auto point_seed = [&](std::size_t index) {
    return seed + static_cast<std::uint64_t>(index) *
                      static_cast<std::uint64_t>(trials);
  };
  switch (column) {
    case 'a':
      for (int k = 1; k <= 30; ++k)
        rows.push_back(run_point("a", k, 30, k, density, policy, 0.0,
                                 StabilityMode::local, trials,
                                 point_seed(rows.size()), max_steps));
      break;
    case 'b':
      for (int n = 1; n <= 60; ++n)
        rows.push_back(run_point("b", n, n, 5, density, policy, 0.0,
                                 StabilityMode::local, trials,
                                 point_seed(rows.size()), max_steps));
      break;
    case 'c':
      for (const double p : {0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0})
        rows.push_back(run_point("c", p, 30, 5, density, policy, p,
                                 StabilityMode::global, trials,
                                 point_seed(rows.size()), max_steps));
      break;
    default:
      throw_error(Errc::bad_config, std::string("unknown sweep column '") +
                                        column + "'");
  }
  return rows;
}

std::vector<BoundCheck> check_theorem1_bound(
    const std::vector<std::pair<int, int>>& samples, int trials,
    std::uint64_t seed) {
  std::vector<BoundCheck> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [n, m] = samples[i];
    RngStream gen(seed + i);
    ExperimentSpec spec{
        .n = n,
        .k = 1,
        .init = InitSpec::explicit_config(gen_uniform_random(n, 1, m, gen)),
        .params = ModelParams{},
        .mode = StabilityMode::local,
        .trials = trials,
        .base_seed = seed + 1000003 * (i + 1),
        .max_steps = 1'000'000};
    const ExperimentResult result = monte_carlo(spec);
    BoundCheck check{.n = n,
                     .m = m,
                     .mean = result.mean_t_stable,
                     .stderr_of_mean = result.stderr_t_stable,
                     .bound = static_cast<double>(m) * m + 2.0 * (n - m)};
    check.within = result.timeouts == 0 &&
                   check.mean + 3.0 * check.stderr_of_mean <= check.bound;
    out.push_back(check);
  }
  return out;
}

}  // namespace ring_march
