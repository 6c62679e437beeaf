#ifndef PMJP_SSA_HPP
#define PMJP_SSA_HPP

#include <cstdint>

#include "pmjp/model.hpp"
#include "pmjp/rng.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

// Gillespie direct method: holding time ~ Exponential(exit rate), next
// reaction categorical with weights theta_i rho_i. Stops at t_end or at an
// absorbing state; throws resource_error past `max_jumps`.
Trajectory gillespie(const Model& model, const std::vector<double>& theta,
                     const State& init, double t_end, Rng& rng,
                     std::uint64_t max_jumps = 10'000'000);

// Right-continuous readout of the trajectory at the given increasing times.
ObservationSet observe(const Trajectory& trajectory,
                       const std::vector<double>& times);

}  // namespace pmjp

#endif
