#include "pmjp/path_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmjp/samplers.hpp"
#include "pmjp/transient.hpp"

namespace pmjp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void UniformisedChain::apply_transpose(const std::vector<double>& x,
                                       std::vector<double>& y) const {
  A.apply_transpose(x, y);
  for (std::size_t i = 0; i < A.n; ++i) y[i] = x[i] + y[i] / gamma;
}

UniformisedChain uniformise(const StateSpace& space, Generator A,
                            double multiplier) {
  if (multiplier < 1.0)
    throw validation_error("uniformisation multiplier must be >= 1");
  UniformisedChain chain;
  chain.gamma = std::max(multiplier * A.max_exit_rate(), 1e-12);
  chain.space = &space;
  chain.A = std::move(A);
  return chain;
}

namespace {

// off-diagonal B[i][j] = a_ij / gamma, linear scan of row i
double b_entry(const UniformisedChain& chain, long i, long j) {
  if (i == j) return chain.self_loop(i);
  for (std::size_t p = chain.A.row_ptr[i]; p < chain.A.row_ptr[i + 1]; ++p)
    if (chain.A.col[p] == j) return chain.A.val[p] / chain.gamma;
  return 0.0;
}

std::vector<long> observation_indices(const ObservationSet& observations,
                                      const StateSpace& space) {
  std::vector<long> idx;
  for (const auto& obs : observations.points) {
    long i = space.index(obs.state);
    if (i < 0)
      throw infeasible_error("observation not representable in the state space");
    idx.push_back(i);
  }
  return idx;
}

// grid slot holding time t: last grid index with grid[j] <= t
std::size_t slot_of(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

}  // namespace

std::optional<Trajectory> ffbs_sample(const Trajectory& current,
                                      const ObservationSet& observations,
                                      const UniformisedChain& chain, Rng& rng) {
  observations.validate();
  const StateSpace& space = *chain.space;
  std::vector<long> obs_idx = observation_indices(observations, space);
  const double t0 = observations.start_time();
  const double t1 = observations.end_time();

  // auxiliary grid: current jump times plus state-dependent thinning points
  std::vector<double> grid;
  grid.push_back(t0);
  for (std::size_t k = 1; k < current.times.size(); ++k)
    if (current.times[k] > t0 && current.times[k] <= t1)
      grid.push_back(current.times[k]);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> thinned;
  for (std::size_t k = 0; k < current.states.size(); ++k) {
    double seg_start = std::max(current.times[k], t0);
    double seg_end =
        k + 1 < current.times.size() ? current.times[k + 1] : current.t_end;
    seg_end = std::min(seg_end, t1);
    if (seg_end <= seg_start) continue;
    long idx = space.index(current.states[k]);
    // gamma - r(s); states outside the space fall back to the full rate
    double rate = idx >= 0 ? chain.gamma + chain.A.diag[idx] : chain.gamma;
    if (rate <= 0.0) continue;
    std::exponential_distribution<double> exp_dist(rate);
    double t = seg_start + exp_dist(rng);
    while (t < seg_end) {
      thinned.push_back(t);
      t += exp_dist(rng);
    }
  }
  grid.insert(grid.end(), thinned.begin(), thinned.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t g = grid.size();
  const std::size_t n = space.size();

  // delta conditioning slots
  std::vector<std::vector<long>> constraints(g);
  for (std::size_t i = 0; i < observations.size(); ++i)
    constraints[slot_of(grid, observations.points[i].time)].push_back(obs_idx[i]);

  // forward filtering, normalized per slot
  std::vector<std::vector<double>> alpha(g, std::vector<double>(n, 0.0));
  alpha[0][obs_idx[0]] = 1.0;
  std::vector<double> scratch;
  for (std::size_t j = 0; j < g; ++j) {
    if (j > 0) {
      chain.apply_transpose(alpha[j - 1], scratch);
      alpha[j] = scratch;
    }
    for (long c : constraints[j]) {
      double kept = alpha[j][c];
      std::fill(alpha[j].begin(), alpha[j].end(), 0.0);
      alpha[j][c] = kept;
    }
    double norm = 0.0;
    for (double v : alpha[j]) norm += v;
    if (norm == 0.0) return std::nullopt;  // no path through the observations
    for (double& v : alpha[j]) v /= norm;
  }

  // backward sampling
  std::vector<long> z(g);
  {
    double u = unif(rng);
    double acc = 0.0;
    z[g - 1] = static_cast<long>(n) - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += alpha[g - 1][i];
      if (u <= acc) {
        z[g - 1] = static_cast<long>(i);
        break;
      }
    }
  }
  for (std::size_t j = g - 1; j-- > 0;) {
    double total = 0.0;
    std::vector<std::pair<long, double>> weights;
    // candidates: the self-loop predecessor and states with a rate into z[j+1]
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[j][i] == 0.0) continue;
      double w = alpha[j][i] * b_entry(chain, static_cast<long>(i), z[j + 1]);
      if (w > 0.0) {
        weights.emplace_back(static_cast<long>(i), w);
        total += w;
      }
    }
    if (total == 0.0) return std::nullopt;
    double u = unif(rng) * total;
    double acc = 0.0;
    z[j] = weights.back().first;
    for (const auto& [i, w] : weights) {
      acc += w;
      if (u <= acc) {
        z[j] = i;
        break;
      }
    }
  }

  // assemble, removing self-jumps
  Trajectory out;
  out.times.push_back(grid[0]);
  out.states.push_back(space.states[z[0]]);
  for (std::size_t j = 1; j < g; ++j)
    if (z[j] != z[j - 1]) {
      out.times.push_back(grid[j]);
      out.states.push_back(space.states[z[j]]);
    }
  out.t_end = t1;
  return out;
}

double log_evidence(const ObservationSet& observations, const StateSpace& space,
                    const Model& model, const std::vector<double>& theta) {
  observations.validate();
  std::vector<long> obs_idx;
  for (const auto& obs : observations.points) {
    long i = space.index(obs.state);
    if (i < 0) return kNegInf;
    obs_idx.push_back(i);
  }
  Generator A = build_generator(space, model, theta);
  double log_p = 0.0;
  for (std::size_t i = 0; i + 1 < obs_idx.size(); ++i) {
    DistributionVector p0;
    p0.values.assign(space.size(), 0.0);
    p0.values[obs_idx[i]] = 1.0;
    double dt = observations.points[i + 1].time - observations.points[i].time;
    DistributionVector pt = transient_distribution(p0, A, dt);
    double factor = pt.values[obs_idx[i + 1]];
    if (factor <= 0.0) return kNegInf;
    log_p += std::log(factor);
  }
  return log_p;
}

double evidence(const ObservationSet& observations, const StateSpace& space,
                const Model& model, const std::vector<double>& theta) {
  return std::exp(log_evidence(observations, space, model, theta));
}

double log_path_probability(const Trajectory& trajectory,
                            const ObservationSet& observations,
                            const StateSpace& space, const Model& model,
                            const std::vector<double>& theta) {
  trajectory.validate();
  for (const auto& s : trajectory.states)
    if (space.index(s) < 0) return kNegInf;
  for (const auto& obs : observations.points)
    if (trajectory.state_at(obs.time) != obs.state) return kNegInf;
  double log_z = log_evidence(observations, space, model, theta);
  if (log_z == kNegInf) return kNegInf;
  return trajectory_log_likelihood(trajectory, model, theta) - log_z;
}

double path_probability(const Trajectory& trajectory,
                        const ObservationSet& observations,
                        const StateSpace& space, const Model& model,
                        const std::vector<double>& theta) {
  return std::exp(
      log_path_probability(trajectory, observations, space, model, theta));
}

double discrete_path_probability(const std::vector<long>& grid_states,
                                 const std::vector<double>& grid_times,
                                 const ObservationSet& observations,
                                 const UniformisedChain& chain) {
  if (grid_states.size() != grid_times.size() || grid_states.empty())
    throw dimension_error("grid states/times mismatch");
  const StateSpace& space = *chain.space;
  std::vector<long> obs_idx = observation_indices(observations, space);
  std::vector<std::vector<long>> constraints(grid_times.size());
  for (std::size_t i = 0; i < observations.size(); ++i)
    constraints[slot_of(grid_times, observations.points[i].time)]
        .push_back(obs_idx[i]);

  // numerator: delta start at the first observation, then B transitions
  double numerator = grid_states[0] == obs_idx[0] ? 1.0 : 0.0;
  for (std::size_t j = 0; j < grid_states.size() && numerator > 0.0; ++j) {
    if (j > 0)
      numerator *= b_entry(chain, grid_states[j - 1], grid_states[j]);
    for (long c : constraints[j])
      if (grid_states[j] != c) numerator = 0.0;
  }

  // normalizer: total filtered mass under the same conditioning
  std::vector<double> alpha(space.size(), 0.0);
  alpha[obs_idx[0]] = 1.0;
  std::vector<double> scratch;
  double log_scale = 0.0;
  for (std::size_t j = 0; j < grid_times.size(); ++j) {
    if (j > 0) {
      chain.apply_transpose(alpha, scratch);
      alpha = scratch;
    }
    for (long c : constraints[j]) {
      double kept = alpha[c];
      std::fill(alpha.begin(), alpha.end(), 0.0);
      alpha[c] = kept;
    }
    double norm = 0.0;
    for (double v : alpha) norm += v;
    if (norm == 0.0) return 0.0;
    for (double& v : alpha) v /= norm;
    log_scale += std::log(norm);
  }
  return numerator / std::exp(log_scale);
}

}  // namespace pmjp
