#include "pmjp/transient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmjp {

double DistributionVector::mass() const {
  double m = 0.0;
  for (double v : values) m += v;
  return m;
}

namespace {

struct PoissonWeights {
  double lambda;
  int k = 0;
  double cumulative = 0.0;

  // weight of the current term, computed in log space so large lambda does
  // not underflow the recurrence
  double next() {
    double lw = -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    double w = std::exp(lw);
    cumulative += w;
    ++k;
    return w;
  }
  bool tail_below(double tol) const {
    return 1.0 - cumulative <= tol && k >= lambda;
  }
};

}  // namespace

DistributionVector transient_distribution(const DistributionVector& p0,
                                          const Generator& A, double t,
                                          double tail_tol) {
  if (t < 0.0) throw std::domain_error("negative time in transient solve");
  if (p0.values.size() != A.n)
    throw dimension_error("distribution/generator dimension mismatch");
  double gamma = A.max_exit_rate();
  if (t == 0.0 || gamma == 0.0) return p0;

  std::vector<double> v = p0.values;
  std::vector<double> result(A.n, 0.0);
  std::vector<double> scratch;
  PoissonWeights weights{gamma * t};
  while (true) {
    double w = weights.next();
    if (w > 0.0)
      for (std::size_t i = 0; i < A.n; ++i) result[i] += w * v[i];
    if (weights.tail_below(tail_tol)) break;
    // v <- v B = v + (v A) / gamma
    A.apply_transpose(v, scratch);
    double norm = 0.0;
    for (std::size_t i = 0; i < A.n; ++i) {
      v[i] += scratch[i] / gamma;
      norm += v[i];
    }
    if (norm == 0.0) break;  // all mass has left the box
  }
  DistributionVector out;
  out.values = std::move(result);
  return out;
}

namespace {

State component_max(const State& a, const State& b) {
  State m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::max(a[i], b[i]);
  return m;
}

}  // namespace

std::vector<double> f_levels(const State& s, const State& s_prime, double t,
                             int n_max, const Model& model,
                             const std::vector<double>& theta) {
  if (t < 0.0) throw std::domain_error("negative time in f_levels");
  if (n_max < 0) throw validation_error("negative expansion level");
  if (s.size() != s_prime.size() || s.size() != model.species.size())
    throw dimension_error("state dimension mismatch in f_levels");

  State su = component_max(s, s_prime);
  StateBox box;
  box.lower.assign(s.size(), 0);
  box.upper = su;
  for (auto& u : box.upper) u += n_max;
  StateSpace space = enumerate_box(box);
  Generator A = build_generator(space, model, theta);
  const long start = space.index(s);
  const long target = space.index(s_prime);

  // minimal level containing each state: max_i (state_i - su_i), floored at 0
  std::vector<int> level(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) {
    int lev = 0;
    for (std::size_t i = 0; i < su.size(); ++i)
      lev = std::max(lev, space.states[k][i] - su[i]);
    level[k] = lev;
  }

  double gamma = A.max_exit_rate();
  std::vector<double> result(n_max + 1, 0.0);
  if (gamma == 0.0 || t == 0.0) {
    double v = (s == s_prime) ? 1.0 : 0.0;
    std::fill(result.begin(), result.end(), v);
    return result;
  }

  // one vector per level, each masked to its own sub-box after every step
  std::vector<std::vector<double>> v(n_max + 1,
                                     std::vector<double>(space.size(), 0.0));
  for (auto& vn : v) vn[start] = 1.0;
  std::vector<double> scratch;
  PoissonWeights weights{gamma * t};
  while (true) {
    double w = weights.next();
    if (w > 0.0)
      for (int n = 0; n <= n_max; ++n) result[n] += w * v[n][target];
    if (weights.tail_below(1e-12)) break;
    for (int n = 0; n <= n_max; ++n) {
      A.apply_transpose(v[n], scratch);
      for (std::size_t i = 0; i < space.size(); ++i) {
        v[n][i] = level[i] <= n ? v[n][i] + scratch[i] / gamma : 0.0;
      }
    }
  }
  return result;
}

double f_n(const State& s, const State& s_prime, double t, int n,
           const Model& model, const std::vector<double>& theta) {
  State su = component_max(s, s_prime);
  StateBox box;
  box.lower.assign(s.size(), 0);
  box.upper = su;
  for (auto& u : box.upper) u += n;
  StateSpace space = enumerate_box(box);
  Generator A = build_generator(space, model, theta);
  DistributionVector p0;
  p0.values.assign(space.size(), 0.0);
  p0.values[space.index(s)] = 1.0;
  DistributionVector pt = transient_distribution(p0, A, t);
  return pt.values[space.index(s_prime)];
}

double p_n_term(const State& s, const State& s_prime, double t, int n,
                const Model& model, const std::vector<double>& theta) {
  if (n == 0) return f_n(s, s_prime, t, 0, model, theta);
  std::vector<double> f = f_levels(s, s_prime, t, n, model, theta);
  double p = f[n] - f[n - 1];
  return std::clamp(p, 0.0, f[n]);
}

}  // namespace pmjp
