#ifndef PMJP_SAMPLERS_HPP
#define PMJP_SAMPLERS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/path_sampler.hpp"
#include "pmjp/roulette.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/state_space.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

enum class Algorithm { gibbs, pm_mh, trunc_gibbs };

struct SamplerConfig {
  Algorithm algorithm = Algorithm::gibbs;
  int iterations = 1000;
  int burn_in = 0;
  int thin = 1;
  int chains = 1;
  std::uint64_t seed = 1;

  double schedule_a = 0.95;                // pm-mh and trunc-gibbs
  std::optional<int> fixed_truncation;     // trunc-gibbs: deterministic m
  double gamma_multiplier = 2.0;
  std::vector<double> proposal_sd;         // pm-mh; single value broadcasts
  bool log_scale_proposals = false;
  int gibbs_margin = 10;                   // finite-Gibbs box margin over the observations
  std::optional<LinearInvariant> invariant;

  std::vector<double> init_theta;          // empty: draw from the prior
  int trajectory_every = 0;                // 0 = keep no trajectories

  void validate(const Model& model) const;
};

struct ChainState {
  std::vector<double> theta;
  std::optional<Trajectory> trajectory;       // Gibbs variants
  int truncation_level = 0;                   // trunc-gibbs
  std::shared_ptr<const StateSpace> space;    // trunc-gibbs: current box
  double cached_log_estimate = 0.0;           // pm-mh: log L-hat(theta)
  bool last_accepted = true;
};

// Exact closed-form log density of a CTMC path:
//   sum_k [log theta_{u_k} + log rho_{u_k}(s_k)] - sum_k dt_k r(s_k).
// Throws validation_error when a jump matches no reaction update vector.
double trajectory_log_likelihood(const Trajectory& trajectory,
                                 const Model& model,
                                 const std::vector<double>& theta);

// Conjugate update: theta_i ~ Gamma(a_i + N_i, b_i + sum_k dt_k rho_i(s_k))
// where N_i counts reaction-i jumps in the trajectory.
std::vector<double> gamma_conditional_update(const Trajectory& trajectory,
                                             const Model& model, Rng& rng);

// The (shape, rate) pairs of the update above, split out for exactness tests.
std::vector<GammaPrior> gamma_conditional_parameters(const Trajectory& trajectory,
                                                     const Model& model);

// Finite-space Gibbs sweep: conjugate parameter draw, then one FFBS path draw.
ChainState gibbs_step_finite(const ChainState& state,
                             const ObservationSet& observations,
                             const StateSpace& space, const Model& model,
                             double gamma_multiplier, Rng& rng);

// Strict pseudo-marginal M-H: Gaussian random walk on theta, fresh likelihood
// estimate for the proposal only, stored estimate for the current point.
ChainState pm_mh_step(const ChainState& state,
                      const ObservationSet& observations, const Model& model,
                      const StoppingSchedule& schedule,
                      const std::vector<double>& proposal_sd,
                      bool log_scale_proposals, Rng& rng);

// Truncation-augmented Metropolized Gibbs: draw theta* | S_t, a roulette
// truncation level m*, a path S* by FFBS in the m* box, and accept the block
// with the four-term path-probability ratio.
ChainState algorithm2_step(const ChainState& state,
                           const ObservationSet& observations,
                           const Model& model, const StoppingSchedule& schedule,
                           double gamma_multiplier, Rng& rng);

struct IterationRecord {
  int iteration;
  std::vector<double> theta;
  bool accepted;
  int truncation_level;
  double wall_ms;
};

struct ChainOutput {
  std::vector<IterationRecord> records;  // every iteration
  std::vector<Trajectory> trajectories;
  std::vector<int> trajectory_iterations;
  double acceptance_rate = 0.0;

  // Post burn-in, thinned parameter draws (rows = retained iterations).
  std::vector<std::vector<double>> retained(int burn_in, int thin) const;
};

struct RunResult {
  std::vector<ChainOutput> chains;
};

// Deterministic given config.seed; chain c uses the named stream ("chain", c).
RunResult run_chain(const SamplerConfig& config, const Model& model,
                    const ObservationSet& observations);

}  // namespace pmjp

#endif
