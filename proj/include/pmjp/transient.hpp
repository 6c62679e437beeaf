#ifndef PMJP_TRANSIENT_HPP
#define PMJP_TRANSIENT_HPP

#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/state_space.hpp"

namespace pmjp {

// Substochastic probability vector over a StateSpace.
struct DistributionVector {
  std::vector<double> values;

  double mass() const;
};

// p(t) = p0 e^{At} by the uniformisation (Jensen) series
//   e^{At} p = sum_k Poisson(gamma t; k) B^k p,  B = A/gamma + I,
// truncated when the remaining Poisson tail drops below tail_tol. Never forms
// e^{At}; cost is one sparse pass per series term.
DistributionVector transient_distribution(const DistributionVector& p0,
                                          const Generator& A, double t,
                                          double tail_tol = 1e-12);

// f^(N): probability of being at s_prime at time t while never exceeding
// component-wise max(s, s_prime) + N in any dimension, started from s.
double f_n(const State& s, const State& s_prime, double t, int n,
           const Model& model, const std::vector<double>& theta);

// All of f^(0..n_max) in one pass over the largest box: the series runs on the
// n_max box while each level keeps its own vector, masked to its sub-box after
// every step. The diagonal of the truncated generator is box-independent, so
// the masked propagation equals the per-box computation.
std::vector<double> f_levels(const State& s, const State& s_prime, double t,
                             int n_max, const Model& model,
                             const std::vector<double>& theta);

// p^(N) = f^(N) - f^(N-1) with f^(-1) = 0, clamped to [0, f^(N)].
double p_n_term(const State& s, const State& s_prime, double t, int n,
                const Model& model, const std::vector<double>& theta);

}  // namespace pmjp

#endif
