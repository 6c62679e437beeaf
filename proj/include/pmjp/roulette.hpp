#ifndef PMJP_ROULETTE_HPP
#define PMJP_ROULETTE_HPP

#include <optional>
#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

// Russian roulette stopping rule: q_0 = 0, q_n = 1 - a (1 - q_{n-1}), so the
// continuation probability at check n is 1 - q_n = a^n and
// P(K > n) = prod_{j=1..n} (1 - q_j) = a^{n(n+1)/2}.
// Term N enters the partial sum exactly when K > N, so its importance weight
// is term_weight(N) = P(K > N).
struct StoppingSchedule {
  double a = 0.95;
  std::optional<int> fixed_terms;  // deterministic variant: K = fixed_terms always

  static StoppingSchedule geometric(double a);
  static StoppingSchedule deterministic(int k);

  double survival(int n) const;     // P(K > n)
  double term_weight(int n) const;  // = survival(n)
  double expected_terms() const;

  // Decay a with E[K] = target, by bisection. target >= 1.
  static double decay_for_expected_terms(double target);

  void validate() const;
};

// Number of terms K >= 1 (term 0 is always taken since q_0 = 0).
int sample_stop(const StoppingSchedule& schedule, Rng& rng);

// Memoises f^(N) values for one fixed (s, s', dt, theta) so replicated
// estimates re-solve nothing. Purely an evaluation cache; results are
// identical with or without it.
struct FTermCache {
  std::vector<double> f;  // f[N] for N < computed_up_to
  int computed_up_to = 0;
};

// hat(p) = sum_{N=0}^{K-1} p^(N) / term_weight(N); unbiased for sum_N p^(N),
// always >= f^(0).
double interval_estimate(const State& s, const State& s_prime, double dt,
                         const Model& model, const std::vector<double>& theta,
                         const StoppingSchedule& schedule, Rng& rng,
                         FTermCache* cache = nullptr);

struct LikelihoodEstimate {
  double value = 0.0;  // product of interval estimates, >= 0
  std::vector<int> terms_per_interval;
  std::vector<double> interval_values;
  std::uint64_t seed = 0;  // stream id recorded for reproducibility
};

// Product of independent interval estimates over consecutive observation
// pairs; each interval draws from its own child stream of `rng`. A zero value
// is legal (log = -inf is the caller's concern).
LikelihoodEstimate log_likelihood_estimate(const ObservationSet& observations,
                                           const Model& model,
                                           const std::vector<double>& theta,
                                           const StoppingSchedule& schedule,
                                           Rng& rng,
                                           std::vector<FTermCache>* caches = nullptr);

struct CvReport {
  double mean = 0.0;      // of log estimates, zeros excluded
  double variance = 0.0;
  double cv = 0.0;        // |sd / mean|
  int zero_count = 0;     // replicates with estimate exactly 0
  int n_reps = 0;
  std::vector<double> log_estimates;  // -inf entries for zero estimates
};

CvReport cv_diagnostic(const ObservationSet& observations, const Model& model,
                       const std::vector<double>& theta,
                       const StoppingSchedule& schedule, int n_reps, Rng& rng);

}  // namespace pmjp

#endif
