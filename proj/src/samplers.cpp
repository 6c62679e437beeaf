#include "pmjp/samplers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "pmjp/ssa.hpp"
#include "pmjp/transient.hpp"

namespace pmjp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void SamplerConfig::validate(const Model& model) const {
  if (iterations <= burn_in || burn_in < 0)
    throw validation_error("need iterations > burn_in >= 0");
  if (thin < 1) throw validation_error("thin must be >= 1");
  if (chains < 1) throw validation_error("chains must be >= 1");
  if (gamma_multiplier < 1.0)
    throw validation_error("gamma multiplier must be >= 1");
  if (algorithm == Algorithm::pm_mh) {
    if (proposal_sd.empty())
      throw validation_error("pm-mh needs proposal standard deviations");
    if (proposal_sd.size() != 1 &&
        proposal_sd.size() != model.parameter_count())
      throw validation_error("proposal sd count mismatch");
    for (double sd : proposal_sd)
      if (!(sd > 0.0)) throw validation_error("proposal sds must be positive");
  }
  if (!fixed_truncation && (!(schedule_a > 0.0) || !(schedule_a < 1.0)))
    throw validation_error("schedule a must lie in (0, 1)");
  if (!init_theta.empty() && init_theta.size() != model.parameter_count())
    throw validation_error("init theta length mismatch");
  if (gibbs_margin < 0) throw validation_error("negative gibbs margin");
}

double trajectory_log_likelihood(const Trajectory& trajectory,
                                 const Model& model,
                                 const std::vector<double>& theta) {
  trajectory.validate();
  if (trajectory.states.empty()) return 0.0;
  double ll = 0.0;
  std::vector<int> delta(model.species.size());
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const State& s = trajectory.states[k];
    double seg_end = k + 1 < trajectory.times.size() ? trajectory.times[k + 1]
                                                     : trajectory.t_end;
    ll -= (seg_end - trajectory.times[k]) * exit_rate(model, s, theta);
    if (k + 1 < trajectory.states.size()) {
      for (std::size_t c = 0; c < delta.size(); ++c)
        delta[c] = trajectory.states[k + 1][c] - s[c];
      int u = model.reaction_by_update(delta);
      if (u < 0)
        throw validation_error("trajectory jump matches no reaction update");
      double rate = evaluate_propensity(model.reactions[u], s,
                                        theta[model.reactions[u].parameter_index]);
      ll += std::log(rate);  // -inf when the jump had zero propensity
    }
  }
  return ll;
}

std::vector<GammaPrior> gamma_conditional_parameters(const Trajectory& trajectory,
                                                     const Model& model) {
  trajectory.validate();
  const std::size_t r = model.parameter_count();
  std::vector<double> jump_counts(r, 0.0), weighted_rho(r, 0.0);
  std::vector<int> delta(model.species.size());
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const State& s = trajectory.states[k];
    double seg_end = k + 1 < trajectory.times.size() ? trajectory.times[k + 1]
                                                     : trajectory.t_end;
    double dt = seg_end - trajectory.times[k];
    for (const auto& reaction : model.reactions)
      weighted_rho[reaction.parameter_index] += dt * reaction.law.evaluate(s);
    if (k + 1 < trajectory.states.size()) {
      for (std::size_t c = 0; c < delta.size(); ++c)
        delta[c] = trajectory.states[k + 1][c] - s[c];
      int u = model.reaction_by_update(delta);
      if (u < 0)
        throw validation_error("trajectory jump matches no reaction update");
      jump_counts[model.reactions[u].parameter_index] += 1.0;
    }
  }
  std::vector<GammaPrior> posterior(r);
  for (std::size_t i = 0; i < r; ++i)
    posterior[i] = {model.priors[i].shape + jump_counts[i],
                    model.priors[i].rate + weighted_rho[i]};
  return posterior;
}

std::vector<double> gamma_conditional_update(const Trajectory& trajectory,
                                             const Model& model, Rng& rng) {
  std::vector<GammaPrior> posterior = gamma_conditional_parameters(trajectory, model);
  std::vector<double> theta(posterior.size());
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    std::gamma_distribution<double> dist(posterior[i].shape,
                                         1.0 / posterior[i].rate);
    theta[i] = dist(rng);
  }
  return theta;
}

namespace {

// FFBS with a densifying retry: failed filtering gets a finer grid by raising
// the uniformisation rate.
std::optional<Trajectory> ffbs_with_retry(const Trajectory& current,
                                          const ObservationSet& observations,
                                          const StateSpace& space,
                                          const Model& model,
                                          const std::vector<double>& theta,
                                          double gamma_multiplier, Rng& rng,
                                          int attempts = 8) {
  double mult = gamma_multiplier;
  for (int a = 0; a < attempts; ++a) {
    UniformisedChain chain =
        uniformise(space, build_generator(space, model, theta), mult);
    auto traj = ffbs_sample(current, observations, chain, rng);
    if (traj) return traj;
    mult *= 2.0;
  }
  return std::nullopt;
}

double log_gamma_prior(const Model& model, const std::vector<double>& theta) {
  double lp = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) return kNegInf;
    lp += (model.priors[i].shape - 1.0) * std::log(theta[i]) -
          model.priors[i].rate * theta[i];
  }
  return lp;
}

std::vector<double> draw_prior_theta(const Model& model, Rng& rng) {
  std::vector<double> theta(model.parameter_count());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    std::gamma_distribution<double> dist(model.priors[i].shape,
                                         1.0 / model.priors[i].rate);
    theta[i] = std::max(dist(rng), 1e-12);
  }
  return theta;
}

// Unconditioned SSA draw through the observation window, repaired into the
// space by one FFBS pass. Initialization only.
Trajectory initial_trajectory(const Model& model,
                              const std::vector<double>& theta,
                              const ObservationSet& observations,
                              const StateSpace& space, double gamma_multiplier,
                              Rng& rng) {
  const double t0 = observations.start_time();
  double span = observations.end_time() - t0;
  Trajectory seed = gillespie(model, theta, observations.points[0].state,
                              std::max(span, 1e-9), rng);
  for (double& t : seed.times) t += t0;
  seed.t_end += t0;
  auto repaired = ffbs_with_retry(seed, observations, space, model, theta,
                                  gamma_multiplier, rng, 12);
  if (!repaired)
    throw infeasible_error(
        "could not construct an initial trajectory through the observations");
  return *repaired;
}

}  // namespace

ChainState gibbs_step_finite(const ChainState& state,
                             const ObservationSet& observations,
                             const StateSpace& space, const Model& model,
                             double gamma_multiplier, Rng& rng) {
  if (!state.trajectory) throw validation_error("gibbs step needs a trajectory");
  ChainState next = state;
  next.theta = gamma_conditional_update(*state.trajectory, model, rng);
  auto traj = ffbs_with_retry(*state.trajectory, observations, space, model,
                              next.theta, gamma_multiplier, rng);
  if (!traj)
    throw infeasible_error("FFBS found no path through the observations");
  next.trajectory = std::move(*traj);
  next.last_accepted = true;
  return next;
}

ChainState pm_mh_step(const ChainState& state,
                      const ObservationSet& observations, const Model& model,
                      const StoppingSchedule& schedule,
                      const std::vector<double>& proposal_sd,
                      bool log_scale_proposals, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> proposal(state.theta.size());
  double log_jacobian = 0.0;
  bool in_support = true;
  for (std::size_t i = 0; i < proposal.size(); ++i) {
    double sd = proposal_sd[proposal_sd.size() == 1 ? 0 : i];
    if (log_scale_proposals) {
      proposal[i] = state.theta[i] * std::exp(sd * normal(rng));
      log_jacobian += std::log(proposal[i] / state.theta[i]);
    } else {
      proposal[i] = state.theta[i] + sd * normal(rng);
      if (proposal[i] <= 0.0) in_support = false;  // outside the prior support
    }
  }
  ChainState next = state;
  next.last_accepted = false;
  if (!in_support) return next;

  LikelihoodEstimate est =
      log_likelihood_estimate(observations, model, proposal, schedule, rng);
  if (est.value <= 0.0) return next;  // zero estimate: auto-reject
  double log_alpha = log_gamma_prior(model, proposal) + std::log(est.value) -
                     log_gamma_prior(model, state.theta) -
                     state.cached_log_estimate + log_jacobian;
  if (std::log(unif(rng)) < log_alpha) {
    next.theta = proposal;
    next.cached_log_estimate = std::log(est.value);
    next.last_accepted = true;
  }
  return next;
}

ChainState algorithm2_step(const ChainState& state,
                           const ObservationSet& observations,
                           const Model& model, const StoppingSchedule& schedule,
                           double gamma_multiplier, Rng& rng) {
  if (!state.trajectory || !state.space)
    throw validation_error("algorithm2 step needs a trajectory and a space");
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // 1. parameters given the current path
  std::vector<double> theta_star =
      gamma_conditional_update(*state.trajectory, model, rng);

  // 2. truncation level and path proposal
  int m_star = sample_stop(schedule, rng);
  StateBox box_star = truncation_from_observations(observations, m_star);

  ChainState next = state;
  next.last_accepted = false;

  const StateBox& box_old = state.space->box;
  bool same_box =
      box_star.lower == box_old.lower && box_star.upper == box_old.upper;
  std::shared_ptr<const StateSpace> space_star =
      same_box ? state.space
               : std::make_shared<const StateSpace>(enumerate_box(box_star));

  auto proposal = ffbs_with_retry(*state.trajectory, observations, *space_star,
                                  model, theta_star, gamma_multiplier, rng);
  if (!proposal) return next;

  double log_alpha;
  if (same_box) {
    // identical truncations: the four path terms cancel pairwise
    log_alpha = 0.0;
  } else {
    double lp_new_star =
        log_path_probability(*proposal, observations, *space_star, model, theta_star);
    double lp_new_old = log_path_probability(*state.trajectory, observations,
                                             *space_star, model, theta_star);
    double lp_old_old = log_path_probability(*state.trajectory, observations,
                                             *state.space, model, theta_star);
    double lp_old_star = log_path_probability(*proposal, observations,
                                              *state.space, model, theta_star);
    if (lp_new_old == kNegInf) {
      return next;  // old path leaves the new box: reject
    } else if (lp_old_star == kNegInf) {
      log_alpha = 0.0;  // new path not representable under the old box: accept
    } else {
      log_alpha = lp_new_star + lp_new_old - lp_old_old - lp_old_star;
    }
  }

  if (log_alpha >= 0.0 || std::log(unif(rng)) < log_alpha) {
    next.theta = theta_star;
    next.trajectory = std::move(*proposal);
    next.truncation_level = m_star;
    next.space = space_star;
    next.last_accepted = true;
  }
  return next;
}

std::vector<std::vector<double>> ChainOutput::retained(int burn_in,
                                                       int thin) const {
  std::vector<std::vector<double>> out;
  for (const auto& rec : records)
    if (rec.iteration >= burn_in && (rec.iteration - burn_in) % thin == 0)
      out.push_back(rec.theta);
  return out;
}

namespace {

ChainOutput run_single_chain(const SamplerConfig& config, const Model& model,
                             const ObservationSet& observations,
                             std::uint64_t chain_index) {
  Rng rng = named_stream(config.seed, "chain", chain_index);
  StoppingSchedule schedule =
      config.fixed_truncation
          ? StoppingSchedule::deterministic(*config.fixed_truncation)
          : StoppingSchedule::geometric(config.schedule_a);

  ChainState state;
  state.theta =
      config.init_theta.empty() ? draw_prior_theta(model, rng) : config.init_theta;

  std::shared_ptr<const StateSpace> gibbs_space;
  if (config.algorithm == Algorithm::gibbs) {
    StateBox box = truncation_from_observations(observations, config.gibbs_margin);
    box.invariant = config.invariant;
    gibbs_space = std::make_shared<const StateSpace>(enumerate_box(box));
    state.trajectory = initial_trajectory(model, state.theta, observations,
                                          *gibbs_space, config.gamma_multiplier,
                                          rng);
  } else if (config.algorithm == Algorithm::trunc_gibbs) {
    int m0 = config.fixed_truncation ? *config.fixed_truncation
                                     : sample_stop(schedule, rng);
    state.truncation_level = m0;
    StateBox box = truncation_from_observations(observations, m0);
    state.space = std::make_shared<const StateSpace>(enumerate_box(box));
    state.trajectory = initial_trajectory(model, state.theta, observations,
                                          *state.space, config.gamma_multiplier,
                                          rng);
  } else {
    // pm-mh: the chain carries a likelihood estimate for the current point
    for (int attempt = 0;; ++attempt) {
      LikelihoodEstimate est = log_likelihood_estimate(observations, model,
                                                       state.theta, schedule, rng);
      if (est.value > 0.0) {
        state.cached_log_estimate = std::log(est.value);
        break;
      }
      if (attempt >= 100)
        throw infeasible_error(
            "could not find an initial theta with a non-zero likelihood estimate");
      state.theta = draw_prior_theta(model, rng);
    }
  }

  ChainOutput out;
  out.records.reserve(config.iterations);
  int accepted = 0;
  for (int iter = 0; iter < config.iterations; ++iter) {
    auto start = std::chrono::steady_clock::now();
    switch (config.algorithm) {
      case Algorithm::gibbs:
        state = gibbs_step_finite(state, observations, *gibbs_space, model,
                                  config.gamma_multiplier, rng);
        break;
      case Algorithm::pm_mh:
        state = pm_mh_step(state, observations, model, schedule,
                           config.proposal_sd, config.log_scale_proposals, rng);
        break;
      case Algorithm::trunc_gibbs:
        state = algorithm2_step(state, observations, model, schedule,
                                config.gamma_multiplier, rng);
        break;
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    accepted += state.last_accepted ? 1 : 0;
    out.records.push_back({iter, state.theta, state.last_accepted,
                           state.truncation_level, ms});
    if (config.trajectory_every > 0 && state.trajectory &&
        iter >= config.burn_in &&
        (iter - config.burn_in) % config.trajectory_every == 0) {
      out.trajectories.push_back(*state.trajectory);
      out.trajectory_iterations.push_back(iter);
    }
  }
  out.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.iterations);
  return out;
}

}  // namespace

RunResult run_chain(const SamplerConfig& config, const Model& model,
                    const ObservationSet& observations) {
  config.validate(model);
  observations.validate();
  model.validate();

  RunResult result;
  result.chains.resize(config.chains);
  if (config.chains == 1) {
    result.chains[0] = run_single_chain(config, model, observations, 0);
    return result;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(config.chains);
  for (int c = 0; c < config.chains; ++c)
    workers.emplace_back([&, c] {
      try {
        result.chains[c] = run_single_chain(config, model, observations, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

}  // namespace pmjp
