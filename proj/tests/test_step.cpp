#include <doctest.h>

#include <set>

#include "ring_march/analysis.hpp"
#include "ring_march/grid_io.hpp"
#include "ring_march/step.hpp"

using namespace ring_march;

namespace {

// 8x3 panel used across these tests: one conflict (the pair on the top
// track), and the locust at (2,1) is set up so that after the horizontal
// phase its only legal switch is the cell below it.
const std::vector<std::string> kPanel = {
    "..><>...",  // track 2 (top)
    "..>...<>",  // track 1
    ">....>..",  // track 0
};

ModelParams eager_params() {
  ModelParams params;
  params.policy = SwitchPolicy::eager();
  return params;
}

}  // namespace

TEST_CASE("detect_conflicts matches the facing-pair pattern") {
  CHECK(detect_conflicts(parse_lines({"><.."})).size() == 1);
  CHECK(detect_conflicts(parse_lines({"<>.."})).empty());

  const auto one = detect_conflicts(parse_lines({">><<"}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].left_cell == Coord{1, 0});

  // Wraparound pair.
  const Configuration wrap = parse_lines({"<..>"});
  const auto conflicts = detect_conflicts(wrap);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].left_cell == Coord{3, 0});
  CHECK(conflicts[0].left == wrap.at(3, 0));
  CHECK(conflicts[0].right == wrap.at(0, 0));
}

TEST_CASE("horizontal phase") {
  SUBCASE("unobstructed locust advances one cell per step") {
    Configuration config = parse_lines({">....."});
    RngStream rng(1);
    ModelParams params;
    params.guard_min_two_per_track = false;
    for (int t = 1; t <= 6; ++t) {
      step(config, rng, params);
      CHECK(config.position(0).x == t % 6);
    }
  }
  SUBCASE("platoon advances only into cells empty at step start") {
    Configuration config = parse_lines({">>."});
    RngStream rng(2);
    StepReport report;
    horizontal_phase(config, rng, ModelParams{}, report);
    CHECK(config.at(0, 0) == 0);  // blocked: its target was occupied
    CHECK(config.at(2, 0) == 1);
    REQUIRE(report.horizontal_moves.size() == 1);
    CHECK(report.horizontal_moves[0].id == 1);
  }
  SUBCASE("contested cell is a fair coin") {
    int cw_wins = 0;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
      Configuration config = parse_lines({">.<"});
      RngStream rng(seed);
      StepReport report;
      horizontal_phase(config, rng, ModelParams{}, report);
      REQUIRE(report.contested_cells.size() == 1);
      CHECK(report.contested_cells[0].cell == Coord{1, 0});
      if (config.at(1, 0) == 0) ++cw_wins;  // id 0 is the clockwise locust
    }
    // Two equally likely outcomes: 0.5 within 3 binomial standard errors.
    CHECK(cw_wins > trials / 2 - 150);
    CHECK(cw_wins < trials / 2 + 150);
  }
  SUBCASE("erratic rests keep the locust in place") {
    Configuration config = parse_lines({">....."});
    RngStream rng(3);
    ModelParams params;
    params.rest_probability = 1.0;
    StepReport report;
    horizontal_phase(config, rng, params, report);
    CHECK(config.position(0).x == 0);
    CHECK(report.horizontal_moves.empty());
    CHECK(report.erratic_rests == std::vector<LocustId>{0});
  }
}

TEST_CASE("conflict flips") {
  SUBCASE("the loser joins the winner's heading") {
    int left_wins = 0;
    for (int seed = 0; seed < 10000; ++seed) {
      Configuration config = parse_lines({"><.."});
      RngStream rng(seed);
      auto conflicts = detect_conflicts(config);
      StepReport report;
      apply_conflict_flips(config, conflicts, rng, report);
      CHECK(config.heading(0) == config.heading(1));
      if (report.conflicts[0].winner == 0) ++left_wins;
    }
    CHECK(left_wins > 4850);
    CHECK(left_wins < 5150);
  }
  SUBCASE("no conflicts leaves headings unchanged") {
    Configuration config = parse_lines({">.>."});
    RngStream rng(4);
    auto conflicts = detect_conflicts(config);
    StepReport report;
    apply_conflict_flips(config, conflicts, rng, report);
    CHECK(report.conflicts.empty());
    CHECK(config.heading(0) == Heading::clockwise);
    CHECK(config.heading(1) == Heading::clockwise);
  }
  SUBCASE("flip moves the loser into the other segment, creating none") {
    for (int seed = 0; seed < 8; ++seed) {
      Configuration config = parse_lines({">><<"});
      RngStream rng(seed);
      step(config, rng, ModelParams{});
      CHECK(extract_segments(config, 0).size() == 2);
    }
  }
}

TEST_CASE("vertical eligibility") {
  SUBCASE("panel locust may only drop to the cell below") {
    const Configuration begin = parse_lines(kPanel);
    const LocustId blue = begin.at(2, 1);
    Configuration current = begin;
    RngStream rng(5);
    StepReport report;
    auto conflicts = detect_conflicts(begin);
    REQUIRE(conflicts.size() == 1);
    horizontal_phase(current, rng, eager_params(), report);
    apply_conflict_flips(current, conflicts, rng, report);
    CHECK(current.position(blue) == Coord{3, 1});
    const auto eligible =
        vertical_eligibility(begin, current, eager_params(), blue);
    CHECK(eligible == std::vector<Coord>{{3, 0}});
  }
  SUBCASE("adjacent front fails condition (1)") {
    const Configuration begin = parse_lines({"><..", ">>.."});
    const LocustId left = begin.at(0, 1);
    ModelParams params = eager_params();
    params.guard_min_two_per_track = false;
    CHECK(vertical_eligibility(begin, begin, params, left).empty());
  }
  SUBCASE("uniformly agreeing target track is eligible") {
    const Configuration begin = parse_lines({">.>...<.", ">....>.."});
    const LocustId candidate = begin.at(2, 1);
    Configuration current = begin;
    RngStream rng(6);
    StepReport report;
    horizontal_phase(current, rng, eager_params(), report);
    const auto eligible =
        vertical_eligibility(begin, current, eager_params(), candidate);
    CHECK(eligible == std::vector<Coord>{{3, 0}});
  }
  SUBCASE("guard blocks departure that would underpopulate the track") {
    const Configuration begin = parse_lines({"..>...<.", ">....>.."});
    const LocustId candidate = begin.at(2, 1);
    Configuration current = begin;
    RngStream rng(7);
    StepReport report;
    horizontal_phase(current, rng, eager_params(), report);
    CHECK(vertical_eligibility(begin, current, eager_params(), candidate)
              .empty());
    ModelParams unguarded = eager_params();
    unguarded.guard_min_two_per_track = false;
    CHECK(!vertical_eligibility(begin, current, unguarded, candidate).empty());
  }
}

TEST_CASE("vertical phase") {
  SUBCASE("policy never with p = 0 changes nothing") {
    const Configuration begin = parse_lines(kPanel);
    Configuration current = begin;
    RngStream rng(8);
    StepReport report;
    vertical_phase(begin, current, rng, ModelParams{}, report);
    CHECK(report.vertical_moves.empty());
    CHECK(current == begin);
  }
  SUBCASE("sandwiched locusts cannot move erratically") {
    const Configuration begin = parse_lines({"><..", ">>.."});
    Configuration current = begin;
    RngStream rng(9);
    ModelParams params;
    params.erratic_probability = 1.0;
    params.guard_min_two_per_track = false;
    StepReport report;
    vertical_phase(begin, current, rng, params, report);
    CHECK(report.vertical_moves.empty());
  }
  SUBCASE("probabilistic policy draws a coin per eligible locust") {
    auto run_panel = [](double q) {
      const Configuration begin = parse_lines(kPanel);
      const LocustId blue = begin.at(2, 1);
      Configuration current = begin;
      RngStream rng(14);
      ModelParams params;
      params.policy = SwitchPolicy::probabilistic(q);
      StepReport report;
      auto conflicts = detect_conflicts(begin);
      horizontal_phase(current, rng, params, report);
      apply_conflict_flips(current, conflicts, rng, report);
      vertical_phase(begin, current, rng, params, report);
      return std::make_pair(report.vertical_moves.size(),
                            current.position(blue));
    };
    CHECK(run_panel(0.0) == std::make_pair(std::size_t{0}, Coord{3, 1}));
    CHECK(run_panel(1.0) == std::make_pair(std::size_t{1}, Coord{3, 0}));
  }
  SUBCASE("erratic movers take empty neighbours, evolving the grid") {
    const Configuration begin = parse_lines({"..>.", ">>.."});
    Configuration current = begin;
    RngStream rng(10);
    ModelParams params;
    params.erratic_probability = 1.0;
    params.guard_min_two_per_track = false;
    StepReport report;
    vertical_phase(begin, current, rng, params, report);
    CHECK(report.vertical_moves.size() == 3);
    for (const VerticalMove& move : report.vertical_moves)
      CHECK(move.erratic);
  }
}

TEST_CASE("one full step on the three-track panel") {
  Configuration config = parse_lines(kPanel);
  const LocustId blue = config.at(2, 1);
  const LocustId purple_left = config.at(2, 2);
  const LocustId purple_right = config.at(3, 2);
  RngStream rng(12);
  const StepReport report = step(config, rng, eager_params());

  REQUIRE(report.conflicts.size() == 1);
  CHECK(report.conflicts[0].left == purple_left);
  CHECK(report.conflicts[0].right == purple_right);
  // The conflicting pair never moves; everyone else advanced one cell, and
  // the tracked locust then dropped down into the gap below.
  CHECK(config.position(blue) == Coord{3, 0});
  REQUIRE(report.vertical_moves.size() == 1);
  CHECK(report.vertical_moves[0].id == blue);
  CHECK_FALSE(report.vertical_moves[0].erratic);
  CHECK(config.heading(purple_left) == config.heading(purple_right));

  const AsciiGrid after = render(config);
  CHECK(after.lines[1] == ">....<..");
  CHECK(after.lines[2] == ".>.>..>.");
  // Top track: the pair stayed put with a coin-determined shared heading.
  CHECK(after.lines[0].substr(4) == ".>..");
  const std::string pair = after.lines[0].substr(2, 2);
  const bool both_cw = pair == ">>";
  const bool both_ccw = pair == "<<";
  CHECK((both_cw || both_ccw));
}

TEST_CASE("run_until_stable") {
  SUBCASE("adjacent facing pair stabilizes in one step") {
    for (int seed = 0; seed < 10; ++seed) {
      RngStream rng(seed);
      const RunResult result = run_until_stable(
          parse_lines({"><.."}), rng, ModelParams{}, StabilityMode::local, 100);
      CHECK(result.t_stable == 1);
      CHECK(result.total_conflicts == 1);
    }
  }
  SUBCASE("gap-one facing pair stabilizes in exactly two steps") {
    for (int seed = 0; seed < 20; ++seed) {
      RngStream rng(seed);
      const RunResult result = run_until_stable(
          parse_lines({">.<."}), rng, ModelParams{}, StabilityMode::local, 100);
      CHECK(result.t_stable == 2);
    }
  }
  SUBCASE("uniform heading is stable at time zero") {
    RngStream rng(0);
    const RunResult result = run_until_stable(
        parse_lines({">>.."}), rng, ModelParams{}, StabilityMode::local, 100);
    CHECK(result.t_stable == 0);
    CHECK(result.total_conflicts == 0);
  }
  SUBCASE("uniform swarm rotates rigidly without conflicts") {
    Configuration config = parse_lines({">>>....."});
    RngStream rng(13);
    for (int t = 0; t < 50; ++t) {
      const StepReport report = step(config, rng, ModelParams{});
      CHECK(report.conflicts.empty());
    }
    for (LocustId id = 0; id < 3; ++id)
      CHECK(config.heading(id) == Heading::clockwise);
  }
}

TEST_CASE("engine invariants over random erratic runs") {
  ModelParams params;
  params.rest_probability = 0.2;
  params.erratic_probability = 0.3;
  params.policy = SwitchPolicy::probabilistic(0.5);
  for (int seed = 0; seed < 30; ++seed) {
    RngStream rng(1000 + seed);
    Configuration config = parse_lines({
        ">.<..>",
        "<<.>..",
        ".>.>.<",
    });
    const Configuration initial = config;
    std::vector<StepReport> reports;
    for (int t = 0; t < 60; ++t) {
      const Configuration before = config;
      const StepReport report = step(config, rng, params);

      std::set<LocustId> in_conflict;
      std::set<LocustId> losers;
      for (const Conflict& c : report.conflicts) {
        CHECK(in_conflict.insert(c.left).second);
        CHECK(in_conflict.insert(c.right).second);
        losers.insert(c.winner == c.left ? c.right : c.left);
      }
      for (LocustId id = 0; id < config.locust_count(); ++id) {
        const bool changed = before.heading(id) != config.heading(id);
        CHECK(changed == (losers.count(id) > 0));
      }
      std::set<std::pair<int, int>> vertical_targets;
      for (const VerticalMove& move : report.vertical_moves)
        CHECK(vertical_targets.emplace(move.to.y, move.to.x).second);
      reports.push_back(report);
    }
    CHECK(replay(initial, reports) == config);
  }
}

TEST_CASE("identical seeds give bit-identical report sequences") {
  auto run = [](std::uint64_t seed) {
    RngStream rng(seed);
    ModelParams params;
    params.rest_probability = 0.1;
    params.erratic_probability = 0.1;
    params.policy = SwitchPolicy::eager();
    return run_until_stable(parse_lines({">.<..>", "<<.>.."}), rng, params,
                            StabilityMode::global, 5000,
                            RunOptions{.retain_reports = true});
  };
  const RunResult a = run(777);
  const RunResult b = run(777);
  REQUIRE(a.reports.has_value());
  CHECK(*a.reports == *b.reports);
  CHECK(a.final == b.final);
  CHECK(a.t_stable == b.t_stable);
}
