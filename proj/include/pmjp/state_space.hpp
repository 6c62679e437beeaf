#ifndef PMJP_STATE_SPACE_HPP
#define PMJP_STATE_SPACE_HPP

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

// Restricts enumeration to states with sum_i coeffs[i] * n[i] = value
// (e.g. S + I + R = const for the closed SIR model).
struct LinearInvariant {
  std::vector<long> coeffs;
  long value;
};

struct StateBox {
  State lower;  // component-wise, population models keep this at 0
  State upper;
  std::optional<LinearInvariant> invariant;

  // Plain product count, ignoring the invariant.
  std::uint64_t raw_size() const;
  bool contains(const State& s) const;
};

struct StateHash {
  std::size_t operator()(const State& s) const;
};

// Finite enumeration with a state <-> index bijection. Order is lexicographic
// with the first component most significant.
struct StateSpace {
  StateBox box;
  std::vector<State> states;

  std::size_t size() const { return states.size(); }
  // Position of `s`, or -1 when s is not in the space.
  long index(const State& s) const;

 private:
  friend StateSpace enumerate_box(const StateBox&, std::uint64_t);
  std::vector<std::uint64_t> strides_;  // mixed-radix index, box-only spaces
  std::unordered_map<State, long, StateHash> index_;  // invariant-restricted
};

StateSpace enumerate_box(const StateBox& box, std::uint64_t cap = 5'000'000);

// Sparse substochastic generator over a StateSpace, CSR layout with the
// diagonal split out. diag[i] = -(total exit rate of state i): transitions
// leaving the box are dropped from the off-diagonals but still counted in the
// diagonal, so e^{At} carries p(state at t AND path never left the box).
struct Generator {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<long> col;
  std::vector<double> val;   // off-diagonal a_ij >= 0
  std::vector<double> diag;  // a_ii <= 0

  double max_exit_rate() const;
  // y = x A (row vector times matrix), the natural orientation for p(t) = p(0) e^{At}.
  void apply_transpose(const std::vector<double>& x, std::vector<double>& y) const;
};

Generator build_generator(const StateSpace& space, const Model& model,
                          const std::vector<double>& theta);

// Box with lower = 0 and upper_i = (max over observations of component i) + margin.
StateBox truncation_from_observations(const ObservationSet& observations,
                                      int margin);

}  // namespace pmjp

#endif
