#ifndef PMJP_DIAGNOSTICS_HPP
#define PMJP_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "pmjp/errors.hpp"

namespace pmjp {

// chains x iterations x parameters, all chains equal shape.
struct ChainCollection {
  std::vector<std::vector<std::vector<double>>> chains;

  std::size_t n_chains() const { return chains.size(); }
  std::size_t n_iterations() const { return chains.empty() ? 0 : chains[0].size(); }
  std::size_t n_parameters() const {
    return n_iterations() == 0 ? 0 : chains[0][0].size();
  }
  void validate() const;
  std::vector<double> series(std::size_t chain, std::size_t parameter) const;
};

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series
};

// Initial-monotone-sequence autocorrelation estimator (Geyer).
EssResult ess(const std::vector<double>& samples);

struct PsrfResult {
  double psrf = 0.0;
  bool degenerate = false;  // zero within-chain variance everywhere
};

// Split-chain Gelman-Rubin statistic (each chain halved).
PsrfResult psrf(const ChainCollection& collection, std::size_t parameter);

struct RelativeErrorResult {
  std::vector<double> per_parameter;
  double mean = 0.0;
};

RelativeErrorResult relative_error(const std::vector<double>& posterior_means,
                                   const std::vector<double>& true_theta);

// Per-parameter mean, sd, 2.5/50/97.5% quantiles, ESS, PSRF; JSON text with a
// schema_version field. elapsed_minutes <= 0 suppresses ESS/min.
std::string summary_json(const ChainCollection& collection,
                         const std::vector<std::string>& parameter_names,
                         std::uint64_t seed, const std::string& config_digest,
                         double elapsed_minutes = 0.0);

}  // namespace pmjp

#endif
