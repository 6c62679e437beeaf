// Command-line front end: simulate data, run inference, estimate likelihoods
// and report diagnostics. Exit codes: 0 success, 2 usage/validation,
// 3 runtime/resource.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmjp/csv.hpp"
#include "pmjp/diagnostics.hpp"
#include "pmjp/model.hpp"
#include "pmjp/roulette.hpp"
#include "pmjp/samplers.hpp"
#include "pmjp/ssa.hpp"

namespace {

const std::set<std::string> kBuiltins = {"lv", "sir-finite", "sir-infinite",
                                         "toggle", "birth-death"};

pmjp::Model load_model(const std::string& spec) {
  if (kBuiltins.count(spec)) return pmjp::builtin_model(spec);
  return pmjp::parse_model(pmjp::read_file(spec));
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void check_theta(const pmjp::Model& model, const std::vector<double>& theta) {
  if (theta.size() != model.parameter_count())
    throw pmjp::validation_error("expected " +
                                 std::to_string(model.parameter_count()) +
                                 " parameters, got " + std::to_string(theta.size()));
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (!(theta[i] > 0.0))
      throw pmjp::validation_error("theta[" + std::to_string(i) +
                                   "] must be positive");
}

int cmd_simulate(const std::string& model_spec, const std::string& theta_csv,
                 const std::string& init_csv, double t_end,
                 const std::string& obs_times_csv, int n_obs,
                 std::uint64_t seed, const std::string& out_dir) {
  pmjp::Model model = load_model(model_spec);
  std::vector<double> theta = parse_double_list(theta_csv);
  check_theta(model, theta);
  pmjp::State init = init_csv.empty()
                         ? model.initial_state
                         : pmjp::State(parse_int_list(init_csv));
  if (init.empty())
    throw pmjp::validation_error("model has no init block; pass --init");

  std::vector<double> obs_times;
  if (!obs_times_csv.empty()) {
    obs_times = parse_double_list(obs_times_csv);
  } else {
    for (int i = 0; i < n_obs; ++i)
      obs_times.push_back(t_end * i / std::max(n_obs - 1, 1));
  }

  pmjp::Rng rng = pmjp::named_stream(seed, "simulate");
  pmjp::Trajectory traj = pmjp::gillespie(model, theta, init, t_end, rng);
  pmjp::ObservationSet obs = pmjp::observe(traj, obs_times);

  std::filesystem::create_directories(out_dir);
  pmjp::write_file(out_dir + "/trajectory.csv",
                   pmjp::trajectory_to_csv(traj, model.species));
  pmjp::write_file(out_dir + "/observations.csv",
                   pmjp::observations_to_csv(obs, model.species));
  std::cout << "wrote " << out_dir << "/trajectory.csv and " << out_dir
            << "/observations.csv (" << obs.size() << " observations)\n";
  return 0;
}

int cmd_infer(const std::string& model_spec, const std::string& obs_path,
              const std::string& algorithm, pmjp::SamplerConfig config,
              const std::string& init_theta_csv, const std::string& out_dir) {
  pmjp::Model model = load_model(model_spec);
  pmjp::ObservationSet obs =
      pmjp::observations_from_csv(pmjp::read_file(obs_path), model);

  if (algorithm == "gibbs")
    config.algorithm = pmjp::Algorithm::gibbs;
  else if (algorithm == "pm-mh")
    config.algorithm = pmjp::Algorithm::pm_mh;
  else if (algorithm == "trunc-gibbs")
    config.algorithm = pmjp::Algorithm::trunc_gibbs;
  else
    throw pmjp::validation_error("unknown algorithm '" + algorithm + "'");
  if (!init_theta_csv.empty()) config.init_theta = parse_double_list(init_theta_csv);
  config.validate(model);

  auto start = std::chrono::steady_clock::now();
  pmjp::RunResult result = pmjp::run_chain(config, model, obs);
  double minutes = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count() /
                   60.0;

  std::filesystem::create_directories(out_dir);
  pmjp::ChainCollection collection;
  for (std::size_t c = 0; c < result.chains.size(); ++c) {
    pmjp::write_file(out_dir + "/samples_chain" + std::to_string(c) + ".csv",
                     pmjp::samples_to_csv(result.chains[c], config.burn_in,
                                          config.thin));
    for (std::size_t j = 0; j < result.chains[c].trajectories.size(); ++j)
      pmjp::write_file(
          out_dir + "/trajectory_chain" + std::to_string(c) + "_iter" +
              std::to_string(result.chains[c].trajectory_iterations[j]) + ".csv",
          pmjp::trajectory_to_csv(result.chains[c].trajectories[j],
                                  model.species));
    collection.chains.push_back(
        result.chains[c].retained(config.burn_in, config.thin));
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < model.parameter_count(); ++i)
    names.push_back("theta_" + std::to_string(i));
  std::ostringstream cfg;
  cfg << algorithm << "|" << config.iterations << "|" << config.burn_in << "|"
      << config.thin << "|" << config.chains << "|" << config.schedule_a << "|"
      << config.gamma_multiplier << "|" << config.seed;
  std::string summary = pmjp::summary_json(collection, names, config.seed,
                                           digest(cfg.str()), minutes);
  pmjp::write_file(out_dir + "/summary.json", summary);
  std::cout << summary << "\n";
  return 0;
}

int cmd_loglik(const std::string& model_spec, const std::string& theta_csv,
               const std::string& obs_path, double schedule_a, int reps,
               std::uint64_t seed, const std::string& out_path) {
  pmjp::Model model = load_model(model_spec);
  std::vector<double> theta = parse_double_list(theta_csv);
  check_theta(model, theta);
  pmjp::ObservationSet obs =
      pmjp::observations_from_csv(pmjp::read_file(obs_path), model);
  pmjp::StoppingSchedule schedule = pmjp::StoppingSchedule::geometric(schedule_a);

  pmjp::Rng rng = pmjp::named_stream(seed, "loglik");
  pmjp::CvReport report =
      pmjp::cv_diagnostic(obs, model, theta, schedule, reps, rng);

  std::ostringstream csv;
  csv << "replicate,log_estimate\n";
  for (std::size_t i = 0; i < report.log_estimates.size(); ++i)
    csv << i << "," << report.log_estimates[i] << "\n";
  if (!out_path.empty()) pmjp::write_file(out_path, csv.str());

  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["seed"] = seed;
  doc["schedule_a"] = schedule_a;
  doc["expected_terms"] = schedule.expected_terms();
  doc["replicates"] = report.n_reps;
  doc["mean_log"] = report.mean;
  doc["variance_log"] = report.variance;
  doc["cv"] = report.cv;
  doc["zero_estimates"] = report.zero_count;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_diagnose(const std::vector<std::string>& files) {
  pmjp::ChainCollection collection;
  for (const auto& f : files)
    collection.chains.push_back(pmjp::samples_from_csv(pmjp::read_file(f)));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < collection.n_parameters(); ++i)
    names.push_back("theta_" + std::to_string(i));
  std::cout << pmjp::summary_json(collection, names, 0, "diagnose") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for population Markov jump processes"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate data with the SSA");
  std::string sim_model, sim_theta, sim_init, sim_obs_times, sim_out = "out";
  double sim_t_end = 1.0;
  int sim_n_obs = 20;
  std::uint64_t sim_seed = 1;
  simulate->add_option("--model", sim_model, "built-in name or model file")->required();
  simulate->add_option("--theta", sim_theta, "comma-separated rate parameters")->required();
  simulate->add_option("--init", sim_init, "comma-separated initial counts");
  simulate->add_option("--t-end", sim_t_end)->required();
  simulate->add_option("--obs-times", sim_obs_times, "comma-separated times");
  simulate->add_option("--n-obs", sim_n_obs, "evenly spaced observation count");
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--out-dir", sim_out);

  // infer
  auto* infer = app.add_subcommand("infer", "Run an MCMC sampler");
  std::string inf_model, inf_obs, inf_alg, inf_init_theta, inf_out = "out";
  pmjp::SamplerConfig cfg;
  int fixed_trunc = -1;
  infer->add_option("--model", inf_model)->required();
  infer->add_option("--observations", inf_obs)->required();
  infer->add_option("--algorithm", inf_alg, "gibbs | pm-mh | trunc-gibbs")->required();
  infer->add_option("--iterations", cfg.iterations);
  infer->add_option("--burn-in", cfg.burn_in);
  infer->add_option("--thin", cfg.thin);
  infer->add_option("--chains", cfg.chains);
  infer->add_option("--seed", cfg.seed);
  infer->add_option("--schedule-a", cfg.schedule_a);
  infer->add_option("--fixed-truncation", fixed_trunc, "deterministic truncation level");
  infer->add_option("--gamma-multiplier", cfg.gamma_multiplier);
  infer->add_option("--proposal-sd", cfg.proposal_sd, "pm-mh proposal sds");
  infer->add_flag("--log-scale-proposals", cfg.log_scale_proposals);
  infer->add_option("--margin", cfg.gibbs_margin, "finite-Gibbs box margin");
  infer->add_option("--trajectory-every", cfg.trajectory_every);
  infer->add_option("--init-theta", inf_init_theta);
  infer->add_option("--out-dir", inf_out);

  // loglik
  auto* loglik = app.add_subcommand("loglik", "Replicate likelihood estimates");
  std::string ll_model, ll_theta, ll_obs, ll_out;
  double ll_a = 0.95;
  int ll_reps = 1000;
  std::uint64_t ll_seed = 1;
  loglik->add_option("--model", ll_model)->required();
  loglik->add_option("--theta", ll_theta)->required();
  loglik->add_option("--observations", ll_obs)->required();
  loglik->add_option("--schedule-a", ll_a);
  loglik->add_option("--reps", ll_reps);
  loglik->add_option("--seed", ll_seed);
  loglik->add_option("--out", ll_out, "replicates CSV path");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Summarise sample files");
  std::vector<std::string> diag_files;
  diagnose->add_option("files", diag_files, "samples CSVs, one per chain")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate)
      return cmd_simulate(sim_model, sim_theta, sim_init, sim_t_end,
                          sim_obs_times, sim_n_obs, sim_seed, sim_out);
    if (*infer) {
      if (fixed_trunc >= 0) cfg.fixed_truncation = fixed_trunc;
      return cmd_infer(inf_model, inf_obs, inf_alg, cfg, inf_init_theta, inf_out);
    }
    if (*loglik)
      return cmd_loglik(ll_model, ll_theta, ll_obs, ll_a, ll_reps, ll_seed, ll_out);
    if (*diagnose) return cmd_diagnose(diag_files);
  } catch (const pmjp::resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const pmjp::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
