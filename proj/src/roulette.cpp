#include "pmjp/roulette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmjp/transient.hpp"

namespace pmjp {

StoppingSchedule StoppingSchedule::geometric(double a) {
  StoppingSchedule s;
  s.a = a;
  s.validate();
  return s;
}

StoppingSchedule StoppingSchedule::deterministic(int k) {
  StoppingSchedule s;
  s.fixed_terms = k;
  s.validate();
  return s;
}

void StoppingSchedule::validate() const {
  if (fixed_terms) {
    if (*fixed_terms < 1) throw validation_error("fixed term count must be >= 1");
    return;
  }
  if (!(a > 0.0) || !(a < 1.0))
    throw validation_error("stopping decay a must lie in (0, 1)");
}

double StoppingSchedule::survival(int n) const {
  if (fixed_terms) return n < *fixed_terms ? 1.0 : 0.0;
  // prod_{j=1..n} a^j
  return std::pow(a, 0.5 * n * (n + 1.0));
}

double StoppingSchedule::term_weight(int n) const { return survival(n); }

double StoppingSchedule::expected_terms() const {
  if (fixed_terms) return *fixed_terms;
  double total = 0.0;
  for (int n = 0;; ++n) {
    double s = survival(n);
    total += s;
    if (s < 1e-14) break;
  }
  return total;
}

double StoppingSchedule::decay_for_expected_terms(double target) {
  if (!(target >= 1.0)) throw validation_error("expected term count must be >= 1");
  double lo = 1e-12, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (geometric(mid).expected_terms() < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

int sample_stop(const StoppingSchedule& schedule, Rng& rng) {
  schedule.validate();
  if (schedule.fixed_terms) return *schedule.fixed_terms;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int k = 1;
  double continue_prob = schedule.a;  // 1 - q_1
  while (unif(rng) < continue_prob) {
    ++k;
    continue_prob *= schedule.a;  // 1 - q_{k} = a^k
  }
  return k;
}

namespace {

// f^(0..k-1) for the interval, reusing and extending the cache when present.
const std::vector<double>& interval_f_terms(const State& s, const State& s_prime,
                                            double dt, const Model& model,
                                            const std::vector<double>& theta,
                                            int k, FTermCache* cache,
                                            std::vector<double>& scratch) {
  if (!cache) {
    scratch = f_levels(s, s_prime, dt, k - 1, model, theta);
    return scratch;
  }
  if (cache->computed_up_to < k) {
    std::vector<double> fresh = f_levels(s, s_prime, dt, k - 1, model, theta);
    // append-only so already-used prefix values stay frozen
    for (int n = cache->computed_up_to; n < k; ++n) cache->f.push_back(fresh[n]);
    cache->computed_up_to = k;
  }
  return cache->f;
}

struct IntervalResult {
  double value;
  int terms;
};

IntervalResult interval_estimate_detail(const State& s, const State& s_prime,
                                        double dt, const Model& model,
                                        const std::vector<double>& theta,
                                        const StoppingSchedule& schedule,
                                        Rng& rng, FTermCache* cache) {
  if (!(dt > 0.0)) throw validation_error("interval length must be positive");
  for (double th : theta)
    if (!(th > 0.0)) throw validation_error("theta must be positive");
  int k = sample_stop(schedule, rng);
  std::vector<double> scratch;
  const std::vector<double>& f =
      interval_f_terms(s, s_prime, dt, model, theta, k, cache, scratch);
  double estimate = 0.0;
  double prev = 0.0;
  for (int n = 0; n < k; ++n) {
    double term = std::max(f[n] - prev, 0.0);  // negative round-off -> 0
    estimate += term / schedule.term_weight(n);
    prev = f[n];
  }
  return {estimate, k};
}

}  // namespace

double interval_estimate(const State& s, const State& s_prime, double dt,
                         const Model& model, const std::vector<double>& theta,
                         const StoppingSchedule& schedule, Rng& rng,
                         FTermCache* cache) {
  return interval_estimate_detail(s, s_prime, dt, model, theta, schedule, rng,
                                  cache)
      .value;
}

LikelihoodEstimate log_likelihood_estimate(const ObservationSet& observations,
                                           const Model& model,
                                           const std::vector<double>& theta,
                                           const StoppingSchedule& schedule,
                                           Rng& rng,
                                           std::vector<FTermCache>* caches) {
  observations.validate();
  if (observations.size() < 2)
    throw validation_error("need at least two observations for a likelihood");
  const std::size_t n_intervals = observations.size() - 1;
  if (caches && caches->size() != n_intervals) caches->resize(n_intervals);

  LikelihoodEstimate est;
  est.seed = rng();
  est.value = 1.0;
  for (std::size_t i = 0; i < n_intervals; ++i) {
    // one dedicated stream per interval keeps runs reproducible even when
    // intervals are evaluated concurrently
    Rng interval_rng(stream_seed(est.seed, "interval", i));
    const auto& a = observations.points[i];
    const auto& b = observations.points[i + 1];
    IntervalResult r = interval_estimate_detail(
        a.state, b.state, b.time - a.time, model, theta, schedule, interval_rng,
        caches ? &(*caches)[i] : nullptr);
    est.value *= r.value;
    est.terms_per_interval.push_back(r.terms);
    est.interval_values.push_back(r.value);
  }
  return est;
}

CvReport cv_diagnostic(const ObservationSet& observations, const Model& model,
                       const std::vector<double>& theta,
                       const StoppingSchedule& schedule, int n_reps, Rng& rng) {
  if (n_reps < 2) throw validation_error("cv_diagnostic needs n_reps >= 2");
  std::vector<FTermCache> caches;
  CvReport report;
  report.n_reps = n_reps;
  double sum = 0.0, sum_sq = 0.0;
  int finite = 0;
  for (int rep = 0; rep < n_reps; ++rep) {
    LikelihoodEstimate est =
        log_likelihood_estimate(observations, model, theta, schedule, rng, &caches);
    double log_est = est.value > 0.0
                         ? std::log(est.value)
                         : -std::numeric_limits<double>::infinity();
    report.log_estimates.push_back(log_est);
    if (est.value > 0.0) {
      sum += log_est;
      sum_sq += log_est * log_est;
      ++finite;
    } else {
      ++report.zero_count;
    }
  }
  if (finite >= 2) {
    report.mean = sum / finite;
    report.variance = (sum_sq - sum * sum / finite) / (finite - 1);
    report.cv = report.mean != 0.0
                    ? std::sqrt(std::max(report.variance, 0.0)) / std::abs(report.mean)
                    : 0.0;
  }
  return report;
}

}  // namespace pmjp
