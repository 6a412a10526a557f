#include "ring_march/step.hpp"

#include <algorithm>
#include <cassert>

#include "ring_march/analysis.hpp"

namespace ring_march {

std::vector<Conflict> detect_conflicts(const Configuration& config) {
  std::vector<Conflict> out;
  for (int y = 0; y < config.track_count(); ++y) {
    for (int x = 0; x < config.ring_length(); ++x) {
      const LocustId left = config.at(x, y);
      if (left == kNoLocust || config.heading(left) != Heading::clockwise)
        continue;
      const LocustId right = config.at(x + 1, y);
      if (right == kNoLocust ||
          config.heading(right) != Heading::counterclockwise)
        continue;
      out.push_back(Conflict{left, right, kNoLocust, Coord{x, y}});
    }
  }
  return out;
}

void horizontal_phase(Configuration& config, RngStream& rng,
                      const ModelParams& params, StepReport& report) {
  const int n = config.ring_length();
  const int k = config.track_count();
  const std::vector<LocustId> ids = config.scan_order();

  // Occupancy at phase entry; the blocking rule is judged against this.
  std::vector<char> occupied0(static_cast<std::size_t>(n) * k, 0);
  for (const LocustId id : ids) {
    const Coord c = config.position(id);
    occupied0[static_cast<std::size_t>(c.y) * n + c.x] = 1;
  }

  std::vector<char> rests(config.locust_count(), 0);
  if (params.rest_probability > 0.0) {
    for (const LocustId id : ids) {
      if (rng.bernoulli(params.rest_probability)) {
        rests[id] = 1;
        report.erratic_rests.push_back(id);
      }
    }
  }

  // Attempts into cells that started empty, keyed by target cell so that
  // contested-cell coins are drawn in scan order of the cell.
  struct Attempt {
    int target_cell;
    LocustId id;
    Coord from, to;
  };
  std::vector<Attempt> attempts;
  attempts.reserve(ids.size());
  for (const LocustId id : ids) {
    if (rests[id]) continue;
    const Coord from = config.position(id);
    const Coord to{config.wrap_x(from.x + direction(config.heading(id))),
                   from.y};
    if (occupied0[static_cast<std::size_t>(to.y) * n + to.x]) continue;  // blocked
    attempts.push_back(Attempt{to.y * n + to.x, id, from, to});
  }
  std::stable_sort(attempts.begin(), attempts.end(),
                   [](const Attempt& a, const Attempt& b) {
                     return a.target_cell < b.target_cell;
                   });

  std::vector<HorizontalMove> moves;
  moves.reserve(attempts.size());
  for (std::size_t i = 0; i < attempts.size();) {
    std::size_t j = i + 1;
    while (j < attempts.size() &&
           attempts[j].target_cell == attempts[i].target_cell)
      ++j;
    if (j - i == 1) {
      moves.push_back({attempts[i].id, attempts[i].from, attempts[i].to});
    } else {
      // Two locusts can reach one empty cell only from opposite sides:
      // clockwise from x-1 and counterclockwise from x+1. Heads picks the
      // clockwise contender.
      assert(j - i == 2);
      const Attempt& cw = config.heading(attempts[i].id) == Heading::clockwise
                              ? attempts[i]
                              : attempts[i + 1];
      const Attempt& ccw = config.heading(attempts[i].id) == Heading::clockwise
                               ? attempts[i + 1]
                               : attempts[i];
      const bool cw_wins = rng.coin();
      const Attempt& won = cw_wins ? cw : ccw;
      report.contested_cells.push_back(
          {won.to, won.id, cw_wins ? ccw.id : cw.id});
      moves.push_back({won.id, won.from, won.to});
    }
    i = j;
  }

  // All winners target distinct cells that started empty, so sequential
  // application realizes the simultaneous semantics.
  std::sort(moves.begin(), moves.end(),
            [n](const HorizontalMove& a, const HorizontalMove& b) {
              return a.from.y * n + a.from.x < b.from.y * n + b.from.x;
            });
  for (const HorizontalMove& m : moves) config.move_locust(m.id, m.to);
  report.horizontal_moves = std::move(moves);
}

void apply_conflict_flips(Configuration& config,
                          std::vector<Conflict>& conflicts, RngStream& rng,
                          StepReport& report) {
  for (Conflict& c : conflicts) {
    const bool left_wins = rng.coin();
    c.winner = left_wins ? c.left : c.right;
    const LocustId loser = left_wins ? c.right : c.left;
    config.set_heading(loser, config.heading(c.winner));
  }
  report.conflicts = conflicts;
}

namespace {

// First locust on track y met from x (exclusive) walking by dir; kNoLocust
// when the track is empty.
LocustId first_from(const Configuration& config, int x, int y, int dir) {
  for (int i = 1; i <= config.ring_length(); ++i) {
    const LocustId id = config.at(x + dir * i, y);
    if (id != kNoLocust) return id;
  }
  return kNoLocust;
}

bool can_leave_track(const Configuration& config, const ModelParams& params,
                     int y) {
  return !params.guard_min_two_per_track || config.track_population(y) > 2;
}

}  // namespace

std::vector<Coord> vertical_eligibility(const Configuration& begin_snapshot,
                                        const Configuration& current,
                                        const ModelParams& params, LocustId a) {
  const Coord pos = current.position(a);
  if (!can_leave_track(current, params, pos.y)) return {};

  // Condition (1) on the beginning snapshot: an imminent, non-adjacent
  // conflict with the front.
  const LocustId front0 = front_of(begin_snapshot, a);
  if (front0 == a) return {};
  if (begin_snapshot.heading(front0) == begin_snapshot.heading(a)) return {};
  const Coord a0 = begin_snapshot.position(a);
  const int dir0 = direction(begin_snapshot.heading(a));
  const int gap = dir0 > 0
                      ? dist_cw(begin_snapshot, a0, begin_snapshot.position(front0))
                      : dist_ccw(begin_snapshot, a0, begin_snapshot.position(front0));
  if (gap == 1) return {};

  const Heading h = current.heading(a);
  std::vector<Coord> out;
  for (const int dy : {-1, +1}) {
    const int ny = pos.y + dy;
    if (ny < 0 || ny >= current.track_count()) continue;
    const Coord target{pos.x, ny};
    if (current.occupied(target)) continue;  // (2): target must be empty
    // (2): the would-be front and back on the new track share a's heading.
    // An empty target track is fine: a would be its own front and back.
    const LocustId nf = first_from(current, pos.x, ny, direction(h));
    if (nf != kNoLocust) {
      const LocustId nb = first_from(current, pos.x, ny, -direction(h));
      if (current.heading(nf) != h || current.heading(nb) != h) continue;
    }
    // (3): no locust on the new track is set to step into the target — no
    // clockwise locust one cell behind it, no counterclockwise one ahead.
    const LocustId west = current.at(pos.x - 1, ny);
    if (west != kNoLocust && current.heading(west) == Heading::clockwise)
      continue;
    const LocustId east = current.at(pos.x + 1, ny);
    if (east != kNoLocust && current.heading(east) == Heading::counterclockwise)
      continue;
    out.push_back(target);
  }
  return out;
}

void vertical_phase(const Configuration& begin_snapshot, Configuration& config,
                    RngStream& rng, const ModelParams& params,
                    StepReport& report) {
  const std::vector<LocustId> ids = config.scan_order();
  for (const LocustId id : ids) {
    const bool erratic = params.erratic_probability > 0.0 &&
                         rng.bernoulli(params.erratic_probability);
    Coord to;
    if (erratic) {
      const Coord pos = config.position(id);
      if (!can_leave_track(config, params, pos.y)) continue;
      Coord cand[2];
      int count = 0;
      for (const int dy : {-1, +1}) {
        const int ny = pos.y + dy;
        if (ny < 0 || ny >= config.track_count()) continue;
        if (!config.occupied(pos.x, ny)) cand[count++] = Coord{pos.x, ny};
      }
      if (count == 0) continue;  // erratic moves need an empty adjacent cell
      to = cand[rng.pick(static_cast<std::uint32_t>(count))];
    } else {
      if (params.policy.kind == SwitchPolicy::Kind::never) continue;
      const auto eligible = vertical_eligibility(begin_snapshot, config, params, id);
      if (eligible.empty()) continue;
      if (params.policy.kind == SwitchPolicy::Kind::probabilistic &&
          !rng.bernoulli(params.policy.q))
        continue;
      to = eligible[rng.pick(static_cast<std::uint32_t>(eligible.size()))];
    }
    report.vertical_moves.push_back({id, config.position(id), to, erratic});
    config.move_locust(id, to);
  }
}

StepReport step(Configuration& config, RngStream& rng,
                const ModelParams& params) {
  StepReport report;
  report.time = config.time();
  const Configuration begin_snapshot = config;
  std::vector<Conflict> conflicts = detect_conflicts(begin_snapshot);
  horizontal_phase(config, rng, params, report);
  apply_conflict_flips(config, conflicts, rng, report);
  vertical_phase(begin_snapshot, config, rng, params, report);
  config.set_time(config.time() + 1);
#ifndef NDEBUG
  validate(config, ModelParams{.guard_min_two_per_track = false});
#endif
  return report;
}

bool stability_holds(const Configuration& config, StabilityMode mode) {
  return mode == StabilityMode::local ? is_locally_stable(config)
                                      : is_globally_stable(config);
}

RunResult run_until_stable(Configuration config, RngStream& rng,
                           const ModelParams& params, StabilityMode mode,
                           std::int64_t max_steps, const RunOptions& options) {
  validate(config, params);
  RunResult result{.final = config};
  if (options.retain_reports) result.reports.emplace();
  std::int64_t executed = 0;
  for (;;) {
    if (stability_holds(config, mode)) {
      result.t_stable = config.time();
      break;
    }
    if (executed >= max_steps) {
      result.timed_out = true;
      break;
    }
    std::optional<Configuration> before;
    if (options.on_step) before = config;
    StepReport report = step(config, rng, params);
    ++executed;
    result.total_conflicts += static_cast<std::int64_t>(report.conflicts.size());
    if (options.on_step) options.on_step(*before, report, config);
    if (result.reports) result.reports->push_back(std::move(report));
  }
  result.final = std::move(config);
  return result;
}

Configuration replay(const Configuration& initial,
                     std::span<const StepReport> reports) {
  Configuration config = initial;
  for (const StepReport& report : reports) {
    for (const HorizontalMove& m : report.horizontal_moves)
      config.move_locust(m.id, m.to);
    for (const Conflict& c : report.conflicts) {
      const LocustId loser = c.winner == c.left ? c.right : c.left;
      config.set_heading(loser, config.heading(c.winner));
    }
    for (const VerticalMove& m : report.vertical_moves)
      config.move_locust(m.id, m.to);
    config.set_time(config.time() + 1);
  }
  return config;
}

}  // namespace ring_march
