#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmjp/roulette.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/transient.hpp"

using namespace pmjp;

TEST_CASE("closed-form survival weights") {
  StoppingSchedule s = StoppingSchedule::geometric(0.95);
  for (int n = 0; n <= 50; ++n) {
    // running product of continuation probabilities a^j
    double prod = 1.0;
    for (int j = 1; j <= n; ++j) prod *= std::pow(0.95, j);
    CHECK(std::abs(s.survival(n) - prod) < 1e-12);
    CHECK(s.term_weight(n) == s.survival(n));
  }
  CHECK(s.survival(0) == 1.0);
  CHECK_THROWS_AS(StoppingSchedule::geometric(1.0), validation_error);
  CHECK_THROWS_AS(StoppingSchedule::geometric(0.0), validation_error);
}

TEST_CASE("expected stopping counts match the paper's sweep") {
  CHECK(StoppingSchedule::geometric(0.95).expected_terms() ==
        doctest::Approx(5.55).epsilon(0.01));
  CHECK(StoppingSchedule::geometric(0.75).expected_terms() ==
        doctest::Approx(2.42).epsilon(0.01));
  CHECK(StoppingSchedule::geometric(0.2).expected_terms() ==
        doctest::Approx(1.21).epsilon(0.01));
}

TEST_CASE("decay_for_expected_terms inverts the map") {
  for (double target : {1.5, 2.4, 5.55, 12.5}) {
    double a = StoppingSchedule::decay_for_expected_terms(target);
    CHECK(StoppingSchedule::geometric(a).expected_terms() ==
          doctest::Approx(target).epsilon(1e-9));
  }
}

TEST_CASE("sampled stops match their distribution") {
  Rng rng = named_stream(5, "stops");
  StoppingSchedule s = StoppingSchedule::geometric(0.75);
  const int reps = 100000;
  double sum = 0.0;
  int beyond_zero = 0;
  for (int i = 0; i < reps; ++i) {
    int k = sample_stop(s, rng);
    CHECK(k >= 1);
    sum += k;
    if (k > 1) ++beyond_zero;
  }
  CHECK(sum / reps == doctest::Approx(s.expected_terms()).epsilon(0.02));
  // P(K > 1) = a
  CHECK(static_cast<double>(beyond_zero) / reps ==
        doctest::Approx(0.75).epsilon(0.02));

  // tiny a: one term almost surely
  StoppingSchedule tight = StoppingSchedule::geometric(1e-6);
  for (int i = 0; i < 100; ++i) CHECK(sample_stop(tight, rng) == 1);

  StoppingSchedule fixed = StoppingSchedule::deterministic(4);
  for (int i = 0; i < 10; ++i) CHECK(sample_stop(fixed, rng) == 4);
}

TEST_CASE("deterministic single-term schedule returns f0") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  Rng rng = named_stream(3, "est");
  StoppingSchedule one = StoppingSchedule::deterministic(1);
  double est = interval_estimate({4}, {6}, 0.4, m, theta, one, rng);
  CHECK(est == doctest::Approx(f_n({4}, {6}, 0.4, 0, m, theta)));
}

TEST_CASE("estimates never fall below f0") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  double f0 = f_n({4}, {6}, 0.4, 0, m, theta);
  Rng rng = named_stream(4, "est");
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  FTermCache cache;
  for (int i = 0; i < 500; ++i) {
    double est = interval_estimate({4}, {6}, 0.4, m, theta, s, rng, &cache);
    CHECK(est >= f0 - 1e-15);
  }
}

TEST_CASE("interval estimates are unbiased on the birth-death model") {
  Model m = builtin_model("birth-death");
  Rng theta_rng = named_stream(21, "theta");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  for (int cfg = 0; cfg < 3; ++cfg) {
    std::vector<double> theta{4.0 + 8.0 * u(theta_rng), 0.3 + 1.2 * u(theta_rng)};
    State from{5}, to{8};
    const double dt = 0.35;
    StateSpace wide = enumerate_box({{0}, {38}, std::nullopt});
    double reference = oracle::expm_entry(
        wide, build_generator(wide, m, theta), from, to, dt);

    Rng rng = named_stream(100 + cfg, "unbiased");
    FTermCache cache;
    const int reps = 4000;
    std::vector<double> estimates;
    estimates.reserve(reps);
    for (int i = 0; i < reps; ++i)
      estimates.push_back(
          interval_estimate(from, to, dt, m, theta, s, rng, &cache));
    double mean = oracle::mean(estimates);
    double se = std::sqrt(oracle::sample_variance(estimates) / reps);
    CHECK(std::abs(mean - reference) <= 3.0 * se);
  }
}

TEST_CASE("estimates are deterministic given a seed") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  StoppingSchedule s = StoppingSchedule::geometric(0.95);
  Rng r1 = named_stream(8, "det"), r2 = named_stream(8, "det");
  for (int i = 0; i < 20; ++i)
    CHECK(interval_estimate({4}, {6}, 0.4, m, theta, s, r1) ==
          interval_estimate({4}, {6}, 0.4, m, theta, s, r2));
}

TEST_CASE("caches never change the estimate beyond rounding") {
  // cached f levels come from the widest box requested so far, so individual
  // terms can differ from a fresh narrow-box run in the last few ulps
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  Rng r1 = named_stream(12, "cache"), r2 = named_stream(12, "cache");
  FTermCache cache;
  for (int i = 0; i < 50; ++i) {
    double cached = interval_estimate({4}, {6}, 0.4, m, theta, s, r1, &cache);
    double fresh = interval_estimate({4}, {6}, 0.4, m, theta, s, r2, nullptr);
    CHECK(cached == doctest::Approx(fresh).epsilon(1e-10));
  }
}

namespace {

ObservationSet bd_observations() {
  ObservationSet obs;
  obs.points = {{0.0, {5}}, {0.4, {8}}, {0.9, {6}}};
  return obs;
}

}  // namespace

TEST_CASE("two observations reduce to one interval estimate") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  ObservationSet obs;
  obs.points = {{0.0, {5}}, {0.4, {8}}};
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  Rng rng = named_stream(30, "pair");
  LikelihoodEstimate est = log_likelihood_estimate(obs, m, theta, s, rng);
  REQUIRE(est.terms_per_interval.size() == 1);
  CHECK(est.value == doctest::Approx(est.interval_values[0]));

  Rng replay(stream_seed(est.seed, "interval", 0));
  CHECK(interval_estimate({5}, {8}, 0.4, m, theta, s, replay) ==
        doctest::Approx(est.value));
}

TEST_CASE("three observations multiply two independent intervals") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  Rng rng = named_stream(31, "triple");
  LikelihoodEstimate est = log_likelihood_estimate(bd_observations(), m, theta, s, rng);
  REQUIRE(est.interval_values.size() == 2);
  CHECK(est.value ==
        doctest::Approx(est.interval_values[0] * est.interval_values[1]));
  CHECK_THROWS_AS(
      log_likelihood_estimate({{{0.0, {5}}}}, m, theta, s, rng),
      validation_error);
}

TEST_CASE("cv diagnostic basics") {
  Model m = builtin_model("birth-death");
  std::vector<double> theta{6.0, 0.8};
  Rng rng = named_stream(40, "cv");

  // deterministic schedule: every replicate identical, CV exactly 0
  StoppingSchedule fixed = StoppingSchedule::deterministic(3);
  CvReport flat = cv_diagnostic(bd_observations(), m, theta, fixed, 50, rng);
  CHECK(flat.variance == doctest::Approx(0.0));
  CHECK(flat.cv == doctest::Approx(0.0));
  CHECK(flat.zero_count == 0);

  CHECK_THROWS_AS(
      cv_diagnostic(bd_observations(), m, theta, fixed, 1, rng),
      validation_error);

  // identical seeds give identical reports
  Rng r1 = named_stream(41, "cv"), r2 = named_stream(41, "cv");
  StoppingSchedule s = StoppingSchedule::geometric(0.9);
  CvReport a = cv_diagnostic(bd_observations(), m, theta, s, 100, r1);
  CvReport b = cv_diagnostic(bd_observations(), m, theta, s, 100, r2);
  CHECK(a.cv == b.cv);
  CHECK(a.log_estimates == b.log_estimates);
  CHECK(a.n_reps == 100);
}

TEST_CASE("zero replicates are counted, not propagated") {
  // a pure-death chain cannot climb, so an increasing observation pair gives
  // an exactly-zero estimate every time
  Model m = parse_model(
      "species X\n"
      "reaction death: X:-1 @ theta[0] * X\n"
      "prior theta[0] ~ Gamma(1, 1)\n");
  ObservationSet obs;
  obs.points = {{0.0, {3}}, {1.0, {5}}};
  StoppingSchedule s = StoppingSchedule::geometric(0.5);
  Rng rng = named_stream(50, "zero");
  CvReport rep = cv_diagnostic(obs, m, {1.0}, s, 50, rng);
  CHECK(rep.zero_count == 50);
  CHECK(std::isfinite(rep.mean));
  CHECK(std::isfinite(rep.cv));
  for (double v : rep.log_estimates) CHECK(v == -INFINITY);
}
