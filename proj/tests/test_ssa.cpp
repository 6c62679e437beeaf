#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/ssa.hpp"

using namespace pmjp;

TEST_CASE("absorbing initial state gives a constant trajectory") {
  Model m = parse_model(
      "species X\n"
      "reaction death: X:-1 @ theta[0] * X\n"
      "prior theta[0] ~ Gamma(1, 1)\n");
  Rng rng = named_stream(1, "ssa");
  Trajectory t = gillespie(m, {2.0}, {0}, 5.0, rng);
  CHECK(t.states.size() == 1);
  CHECK(t.states[0] == State{0});
  CHECK(t.t_end == 5.0);
}

TEST_CASE("immigration-only counts have mean lambda t") {
  Model m = parse_model(
      "species X\n"
      "reaction arrive: X:+1 @ theta[0]\n"
      "prior theta[0] ~ Gamma(1, 1)\n");
  const double lambda = 3.0, t_end = 2.0;
  Rng rng = named_stream(2, "ssa");
  const int reps = 10000;
  std::vector<double> finals;
  finals.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    Trajectory t = gillespie(m, {lambda}, {0}, t_end, rng);
    finals.push_back(t.state_at(t_end)[0]);
  }
  double mean = oracle::mean(finals);
  double se = std::sqrt(oracle::sample_variance(finals) / reps);
  CHECK(std::abs(mean - lambda * t_end) <= 3.0 * se);
}

TEST_CASE("holding times are exponential with the exit rate") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{4.0, 0.5};
  const State init{10};
  const double rate = exit_rate(m, init, theta);
  Rng rng = named_stream(3, "ssa");
  const int reps = 10000;
  std::vector<double> holds;
  holds.reserve(reps);
  while (holds.size() < reps) {
    Trajectory t = gillespie(m, theta, init, 10.0, rng);
    if (t.times.size() > 1) holds.push_back(t.times[1]);
  }
  double d = oracle::ks_statistic(
      holds, [&](double x) { return 1.0 - std::exp(-rate * x); });
  CHECK(oracle::ks_pvalue(d, reps) > 0.01);
}

TEST_CASE("counts never go negative") {
  Model lv = builtin_model("lv");
  Rng rng = named_stream(4, "ssa");
  for (int rep = 0; rep < 20; ++rep) {
    Trajectory t = gillespie(lv, {0.05, 0.4, 0.9, 0.04}, {5, 10}, 3.0, rng);
    for (const auto& s : t.states) {
      CHECK(s[0] >= 0);
      CHECK(s[1] >= 0);
    }
    // consecutive states differ by exactly one reaction update
    for (std::size_t k = 1; k < t.states.size(); ++k) {
      std::vector<int> delta{t.states[k][0] - t.states[k - 1][0],
                             t.states[k][1] - t.states[k - 1][1]};
      CHECK(lv.reaction_by_update(delta) >= 0);
    }
  }
}

TEST_CASE("explosion cap raises a resource error") {
  Model m = parse_model(
      "species X\n"
      "reaction arrive: X:+1 @ theta[0]\n"
      "prior theta[0] ~ Gamma(1, 1)\n");
  Rng rng = named_stream(5, "ssa");
  CHECK_THROWS_AS(gillespie(m, {1000.0}, {0}, 100.0, rng, 50), resource_error);
}

TEST_CASE("observe uses right-continuous evaluation") {
  Trajectory t;
  t.states = {{2}, {3}, {2}};
  t.times = {0.0, 1.0, 2.0};
  t.t_end = 3.0;

  ObservationSet at_start = observe(t, {0.0});
  CHECK(at_start.points[0].state == State{2});

  ObservationSet at_jump = observe(t, {1.0});
  CHECK(at_jump.points[0].state == State{3});

  ObservationSet spread = observe(t, {0.5, 1.5, 2.5, 3.0});
  CHECK(spread.points[0].state == State{2});
  CHECK(spread.points[1].state == State{3});
  CHECK(spread.points[2].state == State{2});
  CHECK(spread.points[3].state == State{2});

  CHECK_THROWS(observe(t, {-0.5}));
  CHECK_THROWS(observe(t, {3.5}));
}

TEST_CASE("constant trajectories observe constantly") {
  Trajectory t;
  t.states = {{7}};
  t.times = {0.0};
  t.t_end = 2.0;
  ObservationSet obs = observe(t, {0.0, 1.0, 2.0});
  for (const auto& p : obs.points) CHECK(p.state == State{7});
}
