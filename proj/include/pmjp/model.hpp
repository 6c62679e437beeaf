#ifndef PMJP_MODEL_HPP
#define PMJP_MODEL_HPP

#include <map>
#include <string>
#include <vector>

#include "pmjp/errors.hpp"

namespace pmjp {

// Integer population count vector, one entry per species.
using State = std::vector<int>;

struct Species {
  std::string name;
};

// rho(n) = coefficient * prod_f ff(n[f.species], f.order) * exp(sum_e e.coeff * n[e.species])
// where ff(n, k) = n (n-1) ... (n-k+1) is the falling factorial.
// Covers constant, mass-action and exponentially modulated kinetic laws.
struct MassActionFactor {
  int species;
  int order;  // >= 1
};

struct ExpTerm {
  double coeff;
  int species;
  std::string coeff_name;  // non-empty when the coefficient is a named constant
};

struct KineticLaw {
  double coefficient = 1.0;
  std::vector<MassActionFactor> factors;
  std::vector<ExpTerm> exponential;

  // rho(state) >= 0 for component-wise non-negative states.
  double evaluate(const State& state) const;
  bool is_mass_action() const { return exponential.empty(); }
};

struct Reaction {
  std::string name;
  std::vector<int> update;  // net stoichiometric change, length = species count
  KineticLaw law;
  int parameter_index;
};

struct GammaPrior {
  double shape;  // a > 0
  double rate;   // b > 0
};

struct Model {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  std::vector<GammaPrior> priors;  // one per parameter
  std::map<std::string, double> constants;
  State initial_state;  // from `init` lines; empty when unspecified

  int species_index(const std::string& name) const;  // -1 when absent
  std::size_t parameter_count() const { return priors.size(); }

  // Reaction whose update vector matches `delta`, or -1. Update vectors are
  // distinct within a model, so the match is unique.
  int reaction_by_update(const std::vector<int>& delta) const;

  // Throws validation_error on broken invariants (duplicate names, duplicate
  // update vectors, non-positive priors, out-of-range parameter indices, ...).
  void validate() const;
};

// rate = theta * rho(state); exactly 0 when rho(state) = 0.
double evaluate_propensity(const Reaction& reaction, const State& state,
                           double theta);

// r(state) = sum_i theta_i rho_i(state), the total rate of leaving `state`.
double exit_rate(const Model& model, const State& state,
                 const std::vector<double>& theta);

// Model file format: one declaration per line, `#` comments.
//   species <name>
//   const <name> = <value>
//   reaction <name>: <spec:+k ...> @ theta[<i>] * <rho expression>
//   prior theta[<i>] ~ Gamma(<shape>, <rate>)
//   init <name>=<count> ...
Model parse_model(const std::string& text);
std::string serialize_model(const Model& model);

// lv | sir-finite | sir-infinite | toggle | birth-death
Model builtin_model(const std::string& name);

}  // namespace pmjp

#endif
