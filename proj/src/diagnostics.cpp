#include "pmjp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace pmjp {

void ChainCollection::validate() const {
  if (chains.empty()) throw validation_error("no chains");
  for (const auto& chain : chains) {
    if (chain.size() != chains[0].size())
      throw validation_error("chains have unequal lengths");
    for (const auto& row : chain)
      if (row.size() != chains[0][0].size())
        throw validation_error("inconsistent parameter counts");
  }
}

std::vector<double> ChainCollection::series(std::size_t chain,
                                            std::size_t parameter) const {
  std::vector<double> out;
  out.reserve(n_iterations());
  for (const auto& row : chains[chain]) out.push_back(row[parameter]);
  return out;
}

namespace {

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double variance_of(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return x.size() > 1 ? s / (x.size() - 1) : 0.0;
}

double autocovariance(const std::vector<double>& x, double mean, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i)
    s += (x[i] - mean) * (x[i + lag] - mean);
  return s / x.size();
}

double quantile(std::vector<double> sorted, double q) {
  double pos = q * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

EssResult ess(const std::vector<double>& samples) {
  if (samples.size() < 10) throw validation_error("ess needs at least 10 samples");
  const double mean = mean_of(samples);
  const double c0 = autocovariance(samples, mean, 0);
  if (c0 == 0.0) return {0.0, true};

  // Geyer: sum consecutive autocorrelation pairs while they stay positive,
  // enforcing monotone decrease
  double sum_rho = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 1; lag + 1 < samples.size(); lag += 2) {
    double pair = (autocovariance(samples, mean, lag) +
                   autocovariance(samples, mean, lag + 1)) /
                  c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    sum_rho += pair;
    prev_pair = pair;
  }
  double tau = 1.0 + 2.0 * sum_rho;
  double value = std::clamp(samples.size() / tau, 1e-12,
                            static_cast<double>(samples.size()));
  return {value, false};
}

PsrfResult psrf(const ChainCollection& collection, std::size_t parameter) {
  collection.validate();
  if (collection.n_chains() < 2)
    throw validation_error("psrf needs at least 2 chains");
  if (collection.n_iterations() < 4)
    throw validation_error("psrf needs at least 4 iterations per chain");

  // split each chain in half
  std::vector<std::vector<double>> halves;
  for (std::size_t c = 0; c < collection.n_chains(); ++c) {
    std::vector<double> x = collection.series(c, parameter);
    std::size_t half = x.size() / 2;
    halves.emplace_back(x.begin(), x.begin() + half);
    halves.emplace_back(x.end() - half, x.end());
  }
  const std::size_t m = halves.size();
  const std::size_t n = halves[0].size();

  std::vector<double> means(m), vars(m);
  for (std::size_t j = 0; j < m; ++j) {
    means[j] = mean_of(halves[j]);
    vars[j] = variance_of(halves[j], means[j]);
  }
  double grand = mean_of(means);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / (m - 1);
  double w = mean_of(vars);
  if (w == 0.0) return {0.0, true};
  double var_plus = (n - 1.0) / n * w + b / n;
  return {std::sqrt(var_plus / w), false};
}

RelativeErrorResult relative_error(const std::vector<double>& posterior_means,
                                   const std::vector<double>& true_theta) {
  if (posterior_means.size() != true_theta.size())
    throw dimension_error("relative_error dimension mismatch");
  RelativeErrorResult result;
  for (std::size_t i = 0; i < true_theta.size(); ++i) {
    if (!(true_theta[i] > 0.0))
      throw validation_error("true theta must be positive");
    result.per_parameter.push_back(
        std::abs(posterior_means[i] - true_theta[i]) / true_theta[i]);
  }
  result.mean = mean_of(result.per_parameter);
  return result;
}

std::string summary_json(const ChainCollection& collection,
                         const std::vector<std::string>& parameter_names,
                         std::uint64_t seed, const std::string& config_digest,
                         double elapsed_minutes) {
  collection.validate();
  if (parameter_names.size() != collection.n_parameters())
    throw dimension_error("parameter name count mismatch");

  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["seed"] = seed;
  doc["config_digest"] = config_digest;
  doc["chains"] = collection.n_chains();
  doc["iterations"] = collection.n_iterations();

  nlohmann::json params = nlohmann::json::object();
  for (std::size_t p = 0; p < collection.n_parameters(); ++p) {
    std::vector<double> pooled;
    double total_ess = 0.0;
    for (std::size_t c = 0; c < collection.n_chains(); ++c) {
      std::vector<double> x = collection.series(c, p);
      EssResult e = ess(x);
      total_ess += e.ess;
      pooled.insert(pooled.end(), x.begin(), x.end());
    }
    double mean = mean_of(pooled);
    double sd = std::sqrt(variance_of(pooled, mean));
    std::sort(pooled.begin(), pooled.end());

    nlohmann::json entry;
    entry["mean"] = mean;
    entry["sd"] = sd;
    entry["q2.5"] = quantile(pooled, 0.025);
    entry["q50"] = quantile(pooled, 0.5);
    entry["q97.5"] = quantile(pooled, 0.975);
    entry["ess"] = total_ess;
    if (elapsed_minutes > 0.0) entry["ess_per_min"] = total_ess / elapsed_minutes;
    if (collection.n_chains() >= 2) {
      PsrfResult r = psrf(collection, p);
      if (r.degenerate)
        entry["psrf"] = nullptr;
      else
        entry["psrf"] = r.psrf;
    }
    params[parameter_names[p]] = entry;
  }
  doc["parameters"] = params;
  return doc.dump(2);
}

}  // namespace pmjp
