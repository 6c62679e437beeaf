// Python bindings for the core operations: model handling, simulation,
// likelihood estimation, the three samplers and convergence diagnostics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmjp/diagnostics.hpp"
#include "pmjp/model.hpp"
#include "pmjp/roulette.hpp"
#include "pmjp/samplers.hpp"
#include "pmjp/ssa.hpp"
#include "pmjp/transient.hpp"

namespace py = pybind11;
using namespace pmjp;

namespace {

StoppingSchedule make_schedule(double a, std::optional<int> fixed_terms) {
  return fixed_terms ? StoppingSchedule::deterministic(*fixed_terms)
                     : StoppingSchedule::geometric(a);
}

ObservationSet make_observations(const std::vector<double>& times,
                                 const std::vector<State>& states) {
  if (times.size() != states.size())
    throw dimension_error("times and states must have equal length");
  ObservationSet obs;
  for (std::size_t i = 0; i < times.size(); ++i)
    obs.points.push_back({times[i], states[i]});
  obs.validate();
  return obs;
}

}  // namespace

PYBIND11_MODULE(_pmjp, m) {
  m.doc() = "Unbiased Bayesian inference for population Markov jump processes";

  py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
  py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<resource_error>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<Model>(m, "Model")
      .def_property_readonly("species_names",
                             [](const Model& mdl) {
                               std::vector<std::string> out;
                               for (const auto& s : mdl.species)
                                 out.push_back(s.name);
                               return out;
                             })
      .def_property_readonly("reaction_names",
                             [](const Model& mdl) {
                               std::vector<std::string> out;
                               for (const auto& r : mdl.reactions)
                                 out.push_back(r.name);
                               return out;
                             })
      .def_property_readonly("parameter_count", &Model::parameter_count)
      .def_property_readonly(
          "initial_state", [](const Model& mdl) { return mdl.initial_state; })
      .def("__repr__", [](const Model& mdl) {
        return "<Model: " + std::to_string(mdl.species.size()) + " species, " +
               std::to_string(mdl.reactions.size()) + " reactions>";
      });

  m.def("parse_model", &parse_model, py::arg("text"));
  m.def("serialize_model", &serialize_model, py::arg("model"));
  m.def("builtin_model", &builtin_model, py::arg("name"),
        "lv | sir-finite | sir-infinite | toggle | birth-death");

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times",
                             [](const Trajectory& t) { return t.times; })
      .def_property_readonly("states",
                             [](const Trajectory& t) { return t.states; })
      .def_property_readonly("t_end",
                             [](const Trajectory& t) { return t.t_end; })
      .def("state_at", &Trajectory::state_at, py::arg("t"))
      .def("jump_count", &Trajectory::jump_count);

  m.def(
      "simulate",
      [](const Model& model, const std::vector<double>& theta,
         const State& init, double t_end, std::uint64_t seed) {
        Rng rng = named_stream(seed, "simulate");
        return gillespie(model, theta, init, t_end, rng);
      },
      py::arg("model"), py::arg("theta"), py::arg("init"), py::arg("t_end"),
      py::arg("seed"));

  m.def(
      "observe",
      [](const Trajectory& traj, const std::vector<double>& times) {
        ObservationSet obs = observe(traj, times);
        std::vector<std::pair<double, State>> out;
        for (const auto& p : obs.points) out.emplace_back(p.time, p.state);
        return out;
      },
      py::arg("trajectory"), py::arg("times"),
      "Noise-free snapshots as (time, state) pairs");

  m.def("f_n", &f_n, py::arg("s"), py::arg("s_prime"), py::arg("t"),
        py::arg("n"), py::arg("model"), py::arg("theta"));
  m.def("f_levels", &f_levels, py::arg("s"), py::arg("s_prime"), py::arg("t"),
        py::arg("n_max"), py::arg("model"), py::arg("theta"));

  m.def(
      "expected_terms",
      [](double a) { return StoppingSchedule::geometric(a).expected_terms(); },
      py::arg("a"));
  m.def("decay_for_expected_terms", &StoppingSchedule::decay_for_expected_terms,
        py::arg("target"));

  m.def(
      "log_likelihood_estimate",
      [](const std::vector<double>& times, const std::vector<State>& states,
         const Model& model, const std::vector<double>& theta, double a,
         std::optional<int> fixed_terms, std::uint64_t seed) {
        ObservationSet obs = make_observations(times, states);
        Rng rng = named_stream(seed, "loglik");
        LikelihoodEstimate est = log_likelihood_estimate(
            obs, model, theta, make_schedule(a, fixed_terms), rng);
        py::dict out;
        out["value"] = est.value;
        out["log_value"] =
            est.value > 0.0 ? std::log(est.value)
                            : -std::numeric_limits<double>::infinity();
        out["terms_per_interval"] = est.terms_per_interval;
        out["interval_values"] = est.interval_values;
        return out;
      },
      py::arg("times"), py::arg("states"), py::arg("model"), py::arg("theta"),
      py::arg("a") = 0.95, py::arg("fixed_terms") = std::nullopt,
      py::arg("seed") = 1);

  m.def(
      "cv_diagnostic",
      [](const std::vector<double>& times, const std::vector<State>& states,
         const Model& model, const std::vector<double>& theta, double a,
         int reps, std::uint64_t seed) {
        ObservationSet obs = make_observations(times, states);
        Rng rng = named_stream(seed, "loglik");
        CvReport rep = cv_diagnostic(obs, model, theta,
                                     StoppingSchedule::geometric(a), reps, rng);
        py::dict out;
        out["mean"] = rep.mean;
        out["variance"] = rep.variance;
        out["cv"] = rep.cv;
        out["zero_count"] = rep.zero_count;
        out["log_estimates"] = rep.log_estimates;
        return out;
      },
      py::arg("times"), py::arg("states"), py::arg("model"), py::arg("theta"),
      py::arg("a") = 0.95, py::arg("reps") = 100, py::arg("seed") = 1);

  m.def(
      "run_chain",
      [](const std::string& algorithm, const std::vector<double>& times,
         const std::vector<State>& states, const Model& model, int iterations,
         int burn_in, int thin, int chains, std::uint64_t seed,
         double schedule_a, std::optional<int> fixed_truncation,
         double gamma_multiplier, const std::vector<double>& proposal_sd,
         bool log_scale_proposals, int margin,
         const std::vector<double>& init_theta) {
        SamplerConfig config;
        if (algorithm == "gibbs")
          config.algorithm = Algorithm::gibbs;
        else if (algorithm == "pm-mh")
          config.algorithm = Algorithm::pm_mh;
        else if (algorithm == "trunc-gibbs")
          config.algorithm = Algorithm::trunc_gibbs;
        else
          throw validation_error("unknown algorithm '" + algorithm + "'");
        config.iterations = iterations;
        config.burn_in = burn_in;
        config.thin = thin;
        config.chains = chains;
        config.seed = seed;
        config.schedule_a = schedule_a;
        config.fixed_truncation = fixed_truncation;
        config.gamma_multiplier = gamma_multiplier;
        config.proposal_sd = proposal_sd;
        config.log_scale_proposals = log_scale_proposals;
        config.gibbs_margin = margin;
        config.init_theta = init_theta;

        ObservationSet obs = make_observations(times, states);
        config.validate(model);
        RunResult result = run_chain(config, model, obs);

        py::list out;
        for (const auto& chain : result.chains) {
          py::dict entry;
          entry["samples"] = chain.retained(burn_in, thin);
          entry["acceptance_rate"] = chain.acceptance_rate;
          std::vector<int> levels;
          for (const auto& rec : chain.records)
            levels.push_back(rec.truncation_level);
          entry["truncation_levels"] = levels;
          out.append(entry);
        }
        return out;
      },
      py::arg("algorithm"), py::arg("times"), py::arg("states"),
      py::arg("model"), py::arg("iterations") = 1000, py::arg("burn_in") = 0,
      py::arg("thin") = 1, py::arg("chains") = 1, py::arg("seed") = 1,
      py::arg("schedule_a") = 0.95, py::arg("fixed_truncation") = std::nullopt,
      py::arg("gamma_multiplier") = 2.0,
      py::arg("proposal_sd") = std::vector<double>{},
      py::arg("log_scale_proposals") = false, py::arg("margin") = 10,
      py::arg("init_theta") = std::vector<double>{});

  m.def(
      "ess", [](const std::vector<double>& x) { return ess(x).ess; },
      py::arg("samples"));
  m.def(
      "psrf",
      [](const std::vector<std::vector<std::vector<double>>>& chains,
         std::size_t parameter) {
        ChainCollection collection{chains};
        return psrf(collection, parameter).psrf;
      },
      py::arg("chains"), py::arg("parameter") = 0);
  m.def(
      "relative_error",
      [](const std::vector<double>& means, const std::vector<double>& truth) {
        return relative_error(means, truth).mean;
      },
      py::arg("posterior_means"), py::arg("true_theta"));
}
