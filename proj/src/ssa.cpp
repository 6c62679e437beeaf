#include "pmjp/ssa.hpp"

#include <cmath>

namespace pmjp {

Trajectory gillespie(const Model& model, const std::vector<double>& theta,
                     const State& init, double t_end, Rng& rng,
                     std::uint64_t max_jumps) {
  if (!(t_end > 0.0)) throw validation_error("t_end must be positive");
  if (init.size() != model.species.size())
    throw dimension_error("initial state dimension mismatch");
  for (int c : init)
    if (c < 0) throw validation_error("negative initial count");
  for (double th : theta)
    if (!(th > 0.0)) throw validation_error("theta must be positive");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  traj.t_end = t_end;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> propensities(model.reactions.size());
  double t = 0.0;
  State state = init;
  std::uint64_t jumps = 0;
  while (true) {
    double total = 0.0;
    for (std::size_t i = 0; i < model.reactions.size(); ++i) {
      propensities[i] = evaluate_propensity(
          model.reactions[i], state, theta[model.reactions[i].parameter_index]);
      total += propensities[i];
    }
    if (total == 0.0) break;  // absorbing state
    std::exponential_distribution<double> hold(total);
    t += hold(rng);
    if (t >= t_end) break;
    double u = unif(rng) * total;
    double acc = 0.0;
    std::size_t pick = model.reactions.size() - 1;
    for (std::size_t i = 0; i < propensities.size(); ++i) {
      acc += propensities[i];
      if (u <= acc) {
        pick = i;
        break;
      }
    }
    for (std::size_t c = 0; c < state.size(); ++c)
      state[c] += model.reactions[pick].update[c];
    traj.times.push_back(t);
    traj.states.push_back(state);
    if (++jumps > max_jumps)
      throw resource_error("simulation exceeded " + std::to_string(max_jumps) +
                           " jumps");
  }
  return traj;
}

ObservationSet observe(const Trajectory& trajectory,
                       const std::vector<double>& times) {
  trajectory.validate();
  ObservationSet obs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw validation_error("observation times must be strictly increasing");
    obs.points.push_back({times[i], trajectory.state_at(times[i])});
  }
  obs.validate();
  return obs;
}

}  // namespace pmjp
