#ifndef PMJP_TRAJECTORY_HPP
#define PMJP_TRAJECTORY_HPP

#include <vector>

#include "pmjp/errors.hpp"
#include "pmjp/model.hpp"

namespace pmjp {

// Piecewise-constant path. states[k] holds on [times[k], times[k+1]), the last
// state holds until t_end. times are strictly increasing, times[0] is the
// window start.
struct Trajectory {
  std::vector<State> states;
  std::vector<double> times;
  double t_end = 0.0;

  std::size_t jump_count() const { return states.empty() ? 0 : states.size() - 1; }
  double duration() const { return times.empty() ? 0.0 : t_end - times.front(); }

  // Right-continuous evaluation: at a jump instant the post-jump state.
  const State& state_at(double t) const;

  void validate() const;
};

struct Observation {
  double time;
  State state;
};

// Noiseless (time, state) pairs, times strictly increasing.
struct ObservationSet {
  std::vector<Observation> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double start_time() const { return points.front().time; }
  double end_time() const { return points.back().time; }

  void validate() const;
};

}  // namespace pmjp

#endif
