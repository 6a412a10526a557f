#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ring_march/core.hpp"
#include "ring_march/rng.hpp"

namespace ring_march {

// A clockwise locust at (x,y) facing a counterclockwise locust at (x+1,y) at
// the beginning of a step. Resolved by a fair coin; the loser takes the
// winner's heading.
struct Conflict {
  LocustId left = kNoLocust;   // clockwise, at left_cell
  LocustId right = kNoLocust;  // counterclockwise, at left_cell.x + 1
  LocustId winner = kNoLocust;
  Coord left_cell;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

struct HorizontalMove {
  LocustId id = kNoLocust;
  Coord from, to;

  friend bool operator==(const HorizontalMove&, const HorizontalMove&) = default;
};

// An empty cell two locusts tried to enter from opposite sides; the coin
// winner moved, the loser stayed put.
struct ContestedCell {
  Coord cell;
  LocustId winner = kNoLocust;
  LocustId loser = kNoLocust;

  friend bool operator==(const ContestedCell&, const ContestedCell&) = default;
};

struct VerticalMove {
  LocustId id = kNoLocust;
  Coord from, to;
  bool erratic = false;

  friend bool operator==(const VerticalMove&, const VerticalMove&) = default;
};

// Audit record of one time step. Vertical moves are listed in application
// order; replaying a report sequence reproduces the run exactly.
struct StepReport {
  std::int64_t time = 0;
  std::vector<Conflict> conflicts;
  std::vector<LocustId> erratic_rests;
  std::vector<HorizontalMove> horizontal_moves;
  std::vector<ContestedCell> contested_cells;
  std::vector<VerticalMove> vertical_moves;

  friend bool operator==(const StepReport&, const StepReport&) = default;
};

enum class StabilityMode { local, global };

struct RunResult {
  std::optional<std::int64_t> t_stable;  // exclusive with timed_out
  bool timed_out = false;
  std::int64_t total_conflicts = 0;
  Configuration final;
  std::optional<std::vector<StepReport>> reports;
};

// Exactly the pairs (clockwise at (x,y), counterclockwise at (x+1,y)),
// in scan order of the left cell.
std::vector<Conflict> detect_conflicts(const Configuration& config);

// Synchronous horizontal phase. Each locust first draws an erratic-rest coin
// (probability r, canonical scan order), then attempts one step in its
// heading direction. Occupancy is judged against the grid at phase entry: a
// locust whose target was occupied then stays put, so a platoon only advances
// into cells that started empty. An empty cell approached from both sides is
// awarded by a fair coin.
void horizontal_phase(Configuration& config, RngStream& rng,
                      const ModelParams& params, StepReport& report);

// Resolves each conflict with a fair coin and flips the loser's heading to
// the winner's. Conflicts must come from detect_conflicts on this step's
// beginning snapshot.
void apply_conflict_flips(Configuration& config, std::vector<Conflict>& conflicts,
                          RngStream& rng, StepReport& report);

// Cells a may switch to, given the beginning-of-step snapshot (condition (1):
// a's front at step start had the opposite heading and was not adjacent) and
// the current grid (conditions (2)-(3): the target cell is empty, the
// would-be front and back on the new track share a's heading, and no locust
// on that track is positioned to step into the target next step). Empty when
// the guard is on and a's departure would leave its track below 2 locusts.
// Candidates are listed lower track first.
std::vector<Coord> vertical_eligibility(const Configuration& begin_snapshot,
                                        const Configuration& current,
                                        const ModelParams& params, LocustId a);

// Vertical phase: one sweep over the locusts in canonical scan order of
// their post-horizontal cells. Each locust draws erratic status (probability
// p); an erratic locust picks uniformly among currently-empty vertically
// adjacent cells, ignoring conditions (1)-(3) but not the guard. A
// non-erratic locust consults the switch policy over its eligibility set.
// Moves apply immediately, so a cell vacated earlier in the sweep is
// available to later movers and no two moves can share a target.
void vertical_phase(const Configuration& begin_snapshot, Configuration& config,
                    RngStream& rng, const ModelParams& params,
                    StepReport& report);

// One synchronous step: conflicts detected on the beginning snapshot, then
// horizontal moves, conflict flips, vertical moves; increments time.
StepReport step(Configuration& config, RngStream& rng,
                const ModelParams& params);

bool stability_holds(const Configuration& config, StabilityMode mode);

struct RunOptions {
  bool retain_reports = false;
  // Called after every executed step with (before, report, after).
  std::function<void(const Configuration&, const StepReport&,
                     const Configuration&)>
      on_step;
};

// Iterates step() until the stability predicate holds at the beginning of a
// step or max_steps have been executed. t_stable is the configuration time
// at the first qualifying step.
RunResult run_until_stable(Configuration config, RngStream& rng,
                           const ModelParams& params, StabilityMode mode,
                           std::int64_t max_steps, const RunOptions& options = {});

// Applies a retained report sequence to the initial configuration; throws if
// any recorded move is inconsistent with the evolving grid.
Configuration replay(const Configuration& initial,
                     std::span<const StepReport> reports);

}  // namespace ring_march
