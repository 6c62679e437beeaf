#ifndef PMJP_PATH_SAMPLER_HPP
#define PMJP_PATH_SAMPLER_HPP

#include <optional>
#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/state_space.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

// Discrete-time embedding B = A/gamma + I over `space`. Substochastic rows
// appear wherever the generator loses mass over the box boundary; interior
// rows sum to 1.
struct UniformisedChain {
  const StateSpace* space = nullptr;
  double gamma = 0.0;
  Generator A;  // kept for exit rates and for transient computations

  double self_loop(long state_index) const {
    return 1.0 + A.diag[state_index] / gamma;
  }
  // y = x B
  void apply_transpose(const std::vector<double>& x, std::vector<double>& y) const;
};

// gamma = multiplier * max exit rate (with a small floor for the all-absorbing
// case); multiplier >= 1.
UniformisedChain uniformise(const StateSpace& space, Generator A,
                            double multiplier = 2.0);

// One Rao-Teh style conditional path draw. The auxiliary grid is the current
// trajectory's jump times plus fresh thinning points drawn at state-dependent
// rate gamma - r(s) along the current path; discrete FFBS over the grid with
// delta conditioning at the observation times; self-jumps removed before
// return. The first observation pins the initial state.
//
// Throws infeasible_error when an observation is not in the space. Returns
// nullopt when filtering finds no path through the observations on this grid
// (the caller may retry with a denser grid).
std::optional<Trajectory> ffbs_sample(const Trajectory& current,
                                      const ObservationSet& observations,
                                      const UniformisedChain& chain, Rng& rng);

// p(Y) = prod over intervals of (e^{A dt})[y_i, y_{i+1}] under the truncated
// generator, with the first observation as the known initial state. Returns 0
// when any observation falls outside the space.
double evidence(const ObservationSet& observations, const StateSpace& space,
                const Model& model, const std::vector<double>& theta);
double log_evidence(const ObservationSet& observations, const StateSpace& space,
                    const Model& model, const std::vector<double>& theta);

// Conditional posterior density of a trajectory in the truncated space,
//   p(S | theta, O, space) = L(S; theta) 1{S stays in space} / p(O | space),
// where L is the closed-form jump-process path density (full exit rates, the
// same ones the substochastic truncation keeps on its diagonal). This is the
// law the FFBS sampler draws from, so it is the quantity entering the
// truncation-augmented acceptance ratio. Returns -inf log for paths leaving
// the space or inconsistent with the observations.
double log_path_probability(const Trajectory& trajectory,
                            const ObservationSet& observations,
                            const StateSpace& space, const Model& model,
                            const std::vector<double>& theta);
double path_probability(const Trajectory& trajectory,
                        const ObservationSet& observations,
                        const StateSpace& space, const Model& model,
                        const std::vector<double>& theta);

// Probability of one discrete FFBS outcome on a fixed grid: the conditional
// probability of the grid state sequence given the observations, under B.
// Test hook for validating the sampler against exhaustive enumeration.
double discrete_path_probability(const std::vector<long>& grid_states,
                                 const std::vector<double>& grid_times,
                                 const ObservationSet& observations,
                                 const UniformisedChain& chain);

}  // namespace pmjp

#endif
