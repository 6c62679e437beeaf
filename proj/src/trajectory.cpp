#include "pmjp/trajectory.hpp"

#include <algorithm>

namespace pmjp {

const State& Trajectory::state_at(double t) const {
  if (states.empty()) throw validation_error("empty trajectory");
  if (t < times.front() || t > t_end)
    throw dimension_error("time outside trajectory span");
  // last index with times[i] <= t
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return states[static_cast<std::size_t>(it - times.begin()) - 1];
}

void Trajectory::validate() const {
  if (states.size() != times.size())
    throw validation_error("trajectory states/times length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw validation_error("trajectory times not strictly increasing");
  if (!times.empty() && t_end < times.back())
    throw validation_error("trajectory end time before last jump");
}

void ObservationSet::validate() const {
  if (points.empty()) throw validation_error("empty observation set");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c : points[i].state)
      if (c < 0) throw validation_error("negative observed count");
    if (i > 0 && !(points[i].time > points[i - 1].time))
      throw validation_error("observation times not strictly increasing");
    if (points[i].state.size() != points[0].state.size())
      throw validation_error("observation dimension mismatch");
  }
}

}  // namespace pmjp
