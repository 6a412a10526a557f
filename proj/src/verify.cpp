#include "ring_march/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ring_march/analysis.hpp"
#include "ring_march/experiments.hpp"
#include "ring_march/oracle.hpp"
#include "ring_march/step.hpp"

namespace ring_march {

namespace {

std::string describe(const Configuration& config) {
  std::ostringstream ss;
  ss << "n=" << config.ring_length() << " k=" << config.track_count()
     << " m=" << config.locust_count() << " t=" << config.time();
  return ss.str();
}

// Tracks one run's per-track two-segment window: from the step a track first
// holds exactly two segments (clockwise tail p, counterclockwise tail q,
// tail distance d) it must be stable or deadlocked within 3d steps, F must
// never increase (strictly decreasing on departure steps), and L must
// strictly decrease on no-departure steps while above 1.
struct TwoSegmentTracker {
  bool active = false;
  bool satisfied = false;
  bool deadline_reported = false;
  LocustId p_tail = kNoLocust;
  LocustId q_tail = kNoLocust;
  std::int64_t deadline = 0;
  Potentials prev;
  std::set<LocustId> prev_members;
};

std::set<LocustId> track_members(const Configuration& config, int track) {
  std::set<LocustId> out;
  for (int x = 0; x < config.ring_length(); ++x) {
    const LocustId id = config.at(x, track);
    if (id != kNoLocust) out.insert(id);
  }
  return out;
}

void update_two_segment_tracker(TwoSegmentTracker& tracker,
                                const Configuration& config, int track,
                                SuiteResult& result) {
  const std::int64_t now = config.time();
  if (tracker.active && is_track_stable(config, track)) {
    if (!tracker.satisfied && !tracker.deadline_reported &&
        now > tracker.deadline)
      result.fail("deadline-3d",
                "track " + std::to_string(track) +
                  " stabilized after the 3d deadline, " + describe(config));
    tracker.active = false;
    return;
  }
  std::vector<Segment> segments;
  if (config.track_population(track) > 0)
    segments = extract_segments(config, track);

  const bool two_now =
      segments.size() == 2 && segments[0].heading != segments[1].heading;
  if (tracker.active) {
    const Segment* p = nullptr;
    const Segment* q = nullptr;
    if (two_now) {
      for (const Segment& seg : segments) {
        if (seg.heading == Heading::clockwise && seg.tail() == tracker.p_tail)
          p = &seg;
        if (seg.heading == Heading::counterclockwise &&
            seg.tail() == tracker.q_tail)
          q = &seg;
      }
    }
    if (!p || !q) {
      // With p = 0 a two-segment track's tails persist until stability.
      result.fail("tails-dissolved",
                "two-segment tails dissolved while track " +
                  std::to_string(track) + " was unstable, " + describe(config));
      tracker.active = false;
      return;
    }
    const Potentials pot =
        compute_potentials(config, track, tracker.p_tail, tracker.q_tail);
    const std::set<LocustId> members = track_members(config, track);
    int departures = 0;
    for (const LocustId id : tracker.prev_members)
      if (!members.count(id)) ++departures;
    ++result.checks;
    if (pot.f > tracker.prev.f)
      result.fail("F-monotonic",
                "F increased " + std::to_string(tracker.prev.f) + " -> " +
                  std::to_string(pot.f) + " on track " + std::to_string(track) +
                  ", " + describe(config));
    if (departures > 0 && pot.f >= tracker.prev.f)
      result.fail("F-strict-on-departure",
                "F did not strictly decrease on a departure step, " +
                  describe(config));
    if (departures == 0 && tracker.prev.l > 1 && pot.l >= tracker.prev.l)
      result.fail("L-strict-decrease",
                "L did not strictly decrease (" +
                  std::to_string(tracker.prev.l) + " -> " +
                  std::to_string(pot.l) + ", head gap L3=" +
                  std::to_string(tracker.prev.l3) + ") with no departures, " +
                  describe(config));
    if (departures > 0 && pot.l > tracker.prev.l + 2 * departures)
      result.fail("L-departure-jump",
                "L rose by more than 2 per departing locust, " +
                  describe(config));
    if (pot.l == 1 && now <= tracker.deadline) tracker.satisfied = true;
    if (!tracker.satisfied && !tracker.deadline_reported &&
        now > tracker.deadline) {
      tracker.deadline_reported = true;
      result.fail("deadline-3d",
                "track " + std::to_string(track) +
                  " neither stable nor deadlocked within 3d steps, " +
                  describe(config));
    }
    tracker.prev = pot;
    tracker.prev_members = std::move(members);
    return;
  }
  if (two_now) {
    const Segment& p = segments[0].heading == Heading::clockwise ? segments[0]
                                                                 : segments[1];
    const Segment& q = segments[0].heading == Heading::clockwise ? segments[1]
                                                                 : segments[0];
    tracker.active = true;
    tracker.satisfied = false;
    tracker.deadline_reported = false;
    tracker.p_tail = p.tail();
    tracker.q_tail = q.tail();
    const int d = dist_cw(config, config.position(p.tail()),
                          config.position(q.tail()));
    tracker.deadline = now + 3 * d;
    tracker.prev = compute_potentials(config, track, p.tail(), q.tail());
    tracker.prev_members = track_members(config, track);
    if (tracker.prev.l == 1) tracker.satisfied = true;
  }
}

// True when ids (all one heading) form a compact front-chain on their track
// and, paired with the opposite chain, sit head-to-head at distance 1.
bool splits_into_deadlock(const Configuration& config,
                          const std::vector<LocustId>& cw,
                          const std::vector<LocustId>& ccw) {
  auto chain_head = [&](const std::vector<LocustId>& ids,
                        Heading h) -> LocustId {
    // Try each member as the tail and walk fronts.
    for (const LocustId start : ids) {
      LocustId cur = start;
      bool ok = true;
      for (std::size_t i = 1; i < ids.size(); ++i) {
        const LocustId next = front_of(config, cur);
        if (std::find(ids.begin(), ids.end(), next) == ids.end()) {
          ok = false;
          break;
        }
        const int gap =
            h == Heading::clockwise
                ? dist_cw(config, config.position(cur), config.position(next))
                : dist_ccw(config, config.position(cur), config.position(next));
        if (gap > 2) {
          ok = false;
          break;
        }
        cur = next;
      }
      if (ok) return cur;  // head of a valid chain
    }
    return kNoLocust;
  };
  const LocustId cw_head = chain_head(cw, Heading::clockwise);
  const LocustId ccw_head = chain_head(ccw, Heading::counterclockwise);
  if (cw_head == kNoLocust || ccw_head == kNoLocust) return false;
  return dist_cw(config, config.position(cw_head),
                 config.position(ccw_head)) == 1;
}

// Applies one report onto `before` while checking every recorded move
// against the model's rules.
Configuration apply_report_checked(const Configuration& before,
                                   const StepReport& report,
                                   const ModelParams& params,
                                   SuiteResult& result) {
  Configuration config = before;
  std::set<std::pair<int, int>> targets;
  for (const HorizontalMove& m : report.horizontal_moves) {
    ++result.checks;
    if (before.occupied(m.to))
      result.fail("horizontal-move",
                "horizontal move into a cell occupied at step start, " +
                  describe(before));
    if (!targets.insert({m.to.y, before.wrap_x(m.to.x)}).second)
      result.fail("horizontal-move",
                "two horizontal moves share a target, " + describe(before));
    const Coord expect{before.wrap_x(m.from.x +
                                     direction(before.heading(m.id))),
                       m.from.y};
    if (!(m.to == expect))
      result.fail("horizontal-move",
                "horizontal move is not one step along the heading, " +
                  describe(before));
    config.move_locust(m.id, m.to);
  }
  for (const Conflict& c : report.conflicts) {
    ++result.checks;
    if (before.at(c.left_cell) != c.left ||
        before.at(c.left_cell.x + 1, c.left_cell.y) != c.right ||
        before.heading(c.left) != Heading::clockwise ||
        before.heading(c.right) != Heading::counterclockwise)
      result.fail("conflict-record",
                "recorded conflict does not match the start snapshot, " +
                  describe(before));
    if (c.winner != c.left && c.winner != c.right)
      result.fail("conflict-record",
                "conflict without a winner, " + describe(before));
    const LocustId loser = c.winner == c.left ? c.right : c.left;
    config.set_heading(loser, config.heading(c.winner));
  }
  for (const VerticalMove& m : report.vertical_moves) {
    ++result.checks;
    if (config.occupied(m.to))
      result.fail("vertical-move",
                "vertical move into an occupied cell, " + describe(before));
    if (std::abs(m.to.y - m.from.y) != 1 ||
        config.wrap_x(m.to.x) != config.wrap_x(m.from.x))
      result.fail("vertical-move",
                "vertical move is not one track up or down, " +
                  describe(before));
    if (params.guard_min_two_per_track &&
        config.track_population(m.from.y) <= 2)
      result.fail("vertical-move",
                "vertical move drained a guarded track, " + describe(before));
    if (!m.erratic) {
      const LocustId west = config.at(m.to.x - 1, m.to.y);
      const LocustId east = config.at(m.to.x + 1, m.to.y);
      if ((west != kNoLocust && config.heading(west) == Heading::clockwise) ||
          (east != kNoLocust &&
           config.heading(east) == Heading::counterclockwise))
        result.fail("vertical-move",
                "non-erratic vertical move into a horizontally "
                    "contested cell, " + describe(before));
    }
    config.move_locust(m.id, m.to);
  }
  config.set_time(config.time() + 1);
  return config;
}

void check_step_properties(const Configuration& before,
                           const StepReport& report,
                           const Configuration& after,
                           const ModelParams& params, SuiteResult& result) {
  ++result.checks;
  try {
    validate(after, params);
  } catch (const ModelError& err) {
    result.fail("occupancy",
                std::string("post-step validation: ") + err.what());
  }

  // At most one conflict per locust, and conflicting locusts never move
  // horizontally.
  std::set<LocustId> in_conflict;
  for (const Conflict& c : report.conflicts) {
    if (!in_conflict.insert(c.left).second || !in_conflict.insert(c.right).second)
      result.fail("conflict-uniqueness",
                "locust in two conflicts, " + describe(before));
  }
  for (const HorizontalMove& m : report.horizontal_moves)
    if (in_conflict.count(m.id))
      result.fail("conflict-blocked",
                "conflicting locust moved horizontally, " + describe(before));

  // Headings change exactly at conflict losers.
  std::set<LocustId> losers;
  for (const Conflict& c : report.conflicts)
    losers.insert(c.winner == c.left ? c.right : c.left);
  for (LocustId id = 0; id < before.locust_count(); ++id) {
    const bool changed = before.heading(id) != after.heading(id);
    if (changed != (losers.count(id) > 0))
      result.fail("heading-provenance",
                "heading change without a lost conflict (locust " +
                  std::to_string(id) + "), " + describe(before));
  }

  for (int y = 0; y < before.track_count(); ++y) {
    if (is_track_stable(before, y) && !is_track_stable(after, y))
      result.fail("stable-persistence",
                "stable track " + std::to_string(y) + " destabilized, " +
                  describe(before));
    if (before.track_population(y) > 0 && after.track_population(y) > 0) {
      const auto before_count = extract_segments(before, y).size();
      const auto after_count = extract_segments(after, y).size();
      if (after_count > before_count)
        result.fail("segment-monotonic",
                "segment count grew on track " + std::to_string(y) + ", " +
                    describe(before));
    }
    // Deadlock persistence: each deadlocked pair either re-splits into a
    // deadlocked pair or became heading-uniform.
    for (const auto& [x_set, y_set] : detect_deadlocks(before, y)) {
      ++result.checks;
      std::vector<LocustId> members(x_set.members);
      members.insert(members.end(), y_set.members.begin(),
                     y_set.members.end());
      std::vector<LocustId> cw, ccw;
      bool moved_off = false;
      for (const LocustId id : members) {
        if (after.position(id).y != y) moved_off = true;
        (after.heading(id) == Heading::clockwise ? cw : ccw).push_back(id);
      }
      if (moved_off) {
        result.fail("deadlock-persistence",
                "member of a deadlocked pair left its track, " +
                    describe(before));
        continue;
      }
      if (cw.empty() || ccw.empty()) continue;  // unified
      if (!splits_into_deadlock(after, cw, ccw))
        result.fail("deadlock-persistence",
                "deadlocked pair neither persisted nor unified, " +
                    describe(before));
    }
  }
}

}  // namespace

SuiteResult run_structural_suite(const StructuralSuiteOptions& options) {
  SuiteResult result{.name = "structural"};
  RngStream pick(options.seed ^ 0x9e3779b97f4a7c15ull);
  for (int run = 0; run < options.runs; ++run) {
    const int n = options.min_n +
                  static_cast<int>(pick.pick(static_cast<std::uint32_t>(
                      options.max_n - options.min_n + 1)));
    const int k = 1 + static_cast<int>(
                          pick.pick(static_cast<std::uint32_t>(options.max_k)));
    const bool dense = run % 2 == 0;
    SwitchPolicy policy;
    switch (run % 3) {
      case 0: policy = SwitchPolicy::never(); break;
      case 1: policy = SwitchPolicy::eager(); break;
      default: policy = SwitchPolicy::probabilistic(0.5); break;
    }
    const ModelParams params{.rest_probability = 0.0,
                             .erratic_probability = 0.0,
                             .policy = policy,
                             .guard_min_two_per_track = true};
    RngStream rng(options.seed + static_cast<std::uint64_t>(run));
    Configuration initial =
        dense ? gen_dense(n, k, rng) : gen_sparse(n, k, rng);
    const RunResult outcome =
        run_until_stable(initial, rng, params, StabilityMode::local,
                         options.max_steps, RunOptions{.retain_reports = true});
    if (!outcome.t_stable) {
      result.fail("timeout",
                "run did not reach local stability, " + describe(initial));
      continue;
    }

    std::vector<TwoSegmentTracker> trackers(k);
    for (int y = 0; y < k; ++y)
      update_two_segment_tracker(trackers[y], initial, y, result);

    Configuration state = initial;
    for (const StepReport& report : *outcome.reports) {
      const Configuration next =
          apply_report_checked(state, report, params, result);
      check_step_properties(state, report, next, params, result);
      for (int y = 0; y < k; ++y)
        update_two_segment_tracker(trackers[y], next, y, result);
      state = next;
    }
    ++result.checks;
    if (!(state == outcome.final))
      result.fail("replay",
                "replayed reports disagree with the final configuration, " +
                  describe(initial));
  }
  return result;
}

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 0.0;
  if (x == 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // Series representation.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Continued fraction for the upper tail.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * h;
  return 1.0 - q;
}

double chi_square_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  return 1.0 - gamma_p(dof / 2.0, statistic / 2.0);
}

SuiteResult run_oracle_consistency_suite(int n, int m,
                                         std::int64_t trials_per_state,
                                         std::uint64_t seed) {
  SuiteResult result{.name = "oracle-consistency"};
  const StateSpace space(n, m);
  const ModelParams params{.guard_min_two_per_track = false};
  for (std::int64_t s = 0; s < space.size(); ++s) {
    const Configuration start = space.decode(space.states()[s]);
    ++result.checks;
    if (space.is_absorbing(s) != is_globally_stable(start)) {
      result.fail("absorbing-classification",
                "absorbing flag disagrees with global stability at state " +
                  std::to_string(s));
      continue;
    }
    const auto expected = space.successors(s);
    std::map<std::int64_t, std::int64_t> observed;
    RngStream rng(seed + static_cast<std::uint64_t>(s));
    for (std::int64_t trial = 0; trial < trials_per_state; ++trial) {
      Configuration config = start;
      step(config, rng, params);
      ++observed[space.index_of(space.encode(config))];
    }
    double chi2 = 0.0;
    std::int64_t covered = 0;
    bool impossible = false;
    for (const auto& [succ, prob] : expected) {
      const double exp_count = prob * static_cast<double>(trials_per_state);
      const auto it = observed.find(succ);
      const double obs = it == observed.end()
                             ? 0.0
                             : static_cast<double>(it->second);
      if (it != observed.end()) covered += it->second;
      chi2 += (obs - exp_count) * (obs - exp_count) / exp_count;
    }
    ++result.checks;
    if (covered != trials_per_state) {
      impossible = true;
      result.fail("kernel-support",
                "engine reached a state outside the oracle kernel from "
                  "state " + std::to_string(s));
    }
    const int dof = static_cast<int>(expected.size()) - 1;
    if (!impossible && dof > 0 && chi_square_tail(chi2, dof) < 0.001)
      result.fail("chi-square",
                "chi-square rejects agreement at state " +
                  std::to_string(s) + " (chi2 = " + std::to_string(chi2) +
                  ", dof = " + std::to_string(dof) + ")");
  }
  return result;
}

SuiteResult run_theorem_bound_suite(int instances, int trials,
                                    std::uint64_t seed) {
  SuiteResult result{.name = "theorem-bounds"};
  RngStream pick(seed ^ 0xa5a5a5a55a5a5a5aull);
  std::vector<std::pair<int, int>> samples;
  samples.reserve(instances);
  for (int i = 0; i < instances; ++i) {
    const int n = 5 + static_cast<int>(pick.pick(16));  // 5..20
    const int m = 2 + static_cast<int>(
                          pick.pick(static_cast<std::uint32_t>(n - 2)));  // 2..n-1
    samples.emplace_back(n, m);
  }
  for (const BoundCheck& check : check_theorem1_bound(samples, trials, seed)) {
    ++result.checks;
    if (!check.within)
      result.fail("theorem1-bound",
                "mean " + std::to_string(check.mean) + " + 3se exceeds " +
                  std::to_string(check.bound) + " at n=" +
                  std::to_string(check.n) + " m=" + std::to_string(check.m));
  }
  // Multi-track stabilization spot checks against 3/2 mn + (pi^2/24) m^2.
  struct Spot {
    int n, k;
    bool dense;
  };
  for (const Spot spot : {Spot{12, 2, true}, Spot{15, 3, false}, Spot{10, 4, false}}) {
    ExperimentSpec spec{
        .n = spot.n,
        .k = spot.k,
        .init = spot.dense ? InitSpec::dense() : InitSpec::sparse(),
        .params = ModelParams{.policy = SwitchPolicy::eager()},
        .mode = StabilityMode::local,
        .trials = trials,
        .base_seed = seed + 77777,
        .max_steps = 1'000'000};
    RngStream probe(spec.base_seed);
    const int m = build_initial(spec, probe).locust_count();
    const ExperimentResult outcome = monte_carlo(spec);
    const double bound = 1.5 * m * spot.n +
                         (M_PI * M_PI / 24.0) * static_cast<double>(m) * m;
    ++result.checks;
    if (outcome.timeouts > 0 ||
        outcome.mean_t_stable + 3.0 * outcome.stderr_t_stable > bound)
      result.fail("multitrack-bound",
                "multi-track mean exceeds 3/2 mn + pi^2/24 m^2 at n=" +
                  std::to_string(spot.n) + " k=" + std::to_string(spot.k));
  }
  return result;
}

}  // namespace ring_march
