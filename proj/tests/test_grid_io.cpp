#include <doctest.h>

#include "ring_march/experiments.hpp"
#include "ring_march/grid_io.hpp"

using namespace ring_march;

TEST_CASE("render and parse") {
  SUBCASE("empty grid renders as dots") {
    const Configuration config(3, 3);
    const AsciiGrid grid = render(config);
    REQUIRE(grid.lines.size() == 3);
    for (const std::string& line : grid.lines) CHECK(line == "...");
  }
  SUBCASE("line order is top track first") {
    Configuration config(4, 2);
    config.add_locust({0, 1}, Heading::clockwise);
    config.add_locust({1, 1}, Heading::clockwise);
    config.add_locust({2, 0}, Heading::counterclockwise);
    config.add_locust({3, 0}, Heading::counterclockwise);
    const AsciiGrid grid = render(config);
    CHECK(grid.lines[0] == ">>..");
    CHECK(grid.lines[1] == "..<<");
  }
  SUBCASE("parse assigns ids in scan order from the bottom track") {
    const Configuration config = parse_lines({">>..", "..<<"});
    CHECK(config.at(2, 0) == 0);
    CHECK(config.at(3, 0) == 1);
    CHECK(config.at(0, 1) == 2);
    CHECK(config.heading(0) == Heading::counterclockwise);
    CHECK(config.heading(2) == Heading::clockwise);
  }
  SUBCASE("bad glyphs and ragged lines are rejected") {
    try {
      (void)parse_lines({">x.."});
      CHECK(false);
    } catch (const ModelError& err) {
      CHECK(err.code() == Errc::bad_glyph);
    }
    try {
      (void)parse_lines({">...", ">.."});
      CHECK(false);
    } catch (const ModelError& err) {
      CHECK(err.code() == Errc::ragged_lines);
    }
  }
  SUBCASE("round trip over random configurations") {
    RngStream rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3 + static_cast<int>(rng.pick(10));
      const int k = 1 + static_cast<int>(rng.pick(4));
      Configuration config(n, k);
      const int m = static_cast<int>(rng.pick(
          static_cast<std::uint32_t>(n * k)));
      for (int i = 0; i < m;) {
        const int x = static_cast<int>(rng.pick(static_cast<std::uint32_t>(n)));
        const int y = static_cast<int>(rng.pick(static_cast<std::uint32_t>(k)));
        if (config.occupied(x, y)) continue;
        config.add_locust({x, y}, rng.coin() ? Heading::clockwise
                                             : Heading::counterclockwise);
        ++i;
      }
      config.set_time(trial);
      const Configuration back = parse(render(config));
      // Identity up to relabeling: the rendered panels must agree exactly.
      CHECK(render(back) == render(config));
      CHECK(back.time() == config.time());
      CHECK(back.locust_count() == config.locust_count());
    }
  }
}

TEST_CASE("grid text blocks and traces") {
  Configuration config = parse_lines({">.<."});
  config.set_time(7);
  const std::string text = render_text(config);
  CHECK(text == "t=7\n>.<.\n");
  const AsciiGrid grid = grid_from_text(text);
  CHECK(grid.time == 7);
  CHECK(grid.lines == std::vector<std::string>{">.<."});

  const std::string trace = "t=0\n>.<.\n\nt=1\n.><.\n\nt=2\n.<<.\n";
  const auto blocks = parse_trace(trace);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].time == 0);
  CHECK(blocks[2].time == 2);
  CHECK(blocks[2].lines[0] == ".<<.");
}

TEST_CASE("run config files") {
  SUBCASE("a full config parses") {
    const ExperimentSpec spec = load_run_config(R"({
      "n": 30, "k": 5,
      "init": {"type": "sparse"},
      "params": {"r": 0.0, "p": 0.02,
                 "policy": {"type": "eager"}, "guard": true},
      "mode": "global", "trials": 500, "seed": 42, "max_steps": 500000
    })");
    CHECK(spec.n == 30);
    CHECK(spec.k == 5);
    CHECK(spec.init.kind == InitSpec::Kind::sparse);
    CHECK(spec.params.erratic_probability == doctest::Approx(0.02));
    CHECK(spec.params.policy.kind == SwitchPolicy::Kind::eager);
    CHECK(spec.mode == StabilityMode::global);
    CHECK(spec.trials == 500);
    CHECK(spec.base_seed == 42);
    CHECK(spec.max_steps == 500000);
  }
  SUBCASE("explicit grids ride along") {
    const ExperimentSpec spec = load_run_config(R"({
      "n": 4, "k": 2,
      "init": {"type": "explicit", "grid": [">>..", "..<<"]},
      "mode": "local", "trials": 3, "seed": 9
    })");
    REQUIRE(spec.init.config.has_value());
    CHECK(spec.init.config->locust_count() == 4);
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS((void)load_run_config(R"({
      "n": 4, "k": 1, "init": {"type": "dense"},
      "mode": "local", "trials": 1, "seed": 0, "typo": 1
    })"), ModelError);
    CHECK_THROWS_AS((void)load_run_config(R"({
      "n": 4, "k": 1, "init": {"type": "dense", "wat": 2},
      "mode": "local", "trials": 1, "seed": 0
    })"), ModelError);
  }
  SUBCASE("probabilities outside [0,1] are rejected") {
    CHECK_THROWS_AS((void)load_run_config(R"({
      "n": 4, "k": 1, "init": {"type": "dense"},
      "params": {"p": 1.5},
      "mode": "local", "trials": 1, "seed": 0
    })"), ModelError);
  }
  SUBCASE("q demands a probabilistic policy") {
    CHECK_THROWS_AS((void)load_run_config(R"({
      "n": 4, "k": 1, "init": {"type": "dense"},
      "params": {"policy": {"type": "eager", "q": 0.5}},
      "mode": "local", "trials": 1, "seed": 0
    })"), ModelError);
  }
}

TEST_CASE("csv output") {
  SUBCASE("header and a single row") {
    SweepRow row{.sweep = "a",
                 .point = 30,
                 .n = 30,
                 .k = 30,
                 .m = 90,
                 .density = "sparse",
                 .policy = "eager",
                 .q = std::nullopt,
                 .p = 0.0,
                 .r = 0.0,
                 .mode = "local",
                 .trials = 1000,
                 .seed = 1,
                 .mean_t_stable = 13.5,
                 .stderr_t_stable = 0.25,
                 .timeouts = 0};
    const std::string text = csv_text({row});
    CHECK(text ==
          "sweep,point,n,k,m,density,policy,q,p,r,mode,trials,seed,"
          "mean_t_stable,stderr,timeouts\n"
          "a,30.0,30,30,90,sparse,eager,,0.0,0.0,local,1000,1,13.5,0.25,0\n");
  }
  SUBCASE("infeasible rows leave the mean empty") {
    SweepRow row{.sweep = "b",
                 .point = 2,
                 .n = 2,
                 .k = 5,
                 .m = 5,
                 .density = "dense",
                 .policy = "never",
                 .q = std::nullopt,
                 .p = 0.0,
                 .r = 0.0,
                 .mode = "local",
                 .trials = 100,
                 .seed = 1,
                 .mean_t_stable = std::nullopt,
                 .stderr_t_stable = std::nullopt,
                 .timeouts = 100};
    const std::string text = csv_text({row});
    CHECK(text.find(",,,100\n") != std::string::npos);
  }
  SUBCASE("re-rendering is byte identical") {
    const auto rows =
        sweep_fig4('a', InitSpec::Kind::sparse, SwitchPolicy::eager(), 2, 3);
    CHECK(csv_text(rows) == csv_text(rows));
    const auto again =
        sweep_fig4('a', InitSpec::Kind::sparse, SwitchPolicy::eager(), 2, 3);
    CHECK(csv_text(rows) == csv_text(again));
  }
}

TEST_CASE("format_double") {
  CHECK(format_double(2.0) == "2.0");
  CHECK(format_double(13.5) == "13.5");
  CHECK(format_double(0.02) == "0.02");
  CHECK(format_double(1974.0) == "1974.0");
}
