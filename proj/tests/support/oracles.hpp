// Independent reference implementations for the test suites: a dense matrix
// exponential, KS statistics, grid-quadrature posteriors and moment helpers.
// Nothing here shares code with the library's own numerical paths.

#ifndef PMJP_TESTS_ORACLES_HPP
#define PMJP_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pmjp/state_space.hpp"

namespace oracle {

inline Eigen::MatrixXd dense_generator(const pmjp::Generator& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n, a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    m(i, i) = a.diag[i];
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      m(i, a.col[k]) += a.val[k];
  }
  return m;
}

// p0^T e^{At} by Eigen's scaling-and-squaring Pade exponential.
inline std::vector<double> expm_transient(const std::vector<double>& p0,
                                          const pmjp::Generator& a, double t) {
  Eigen::MatrixXd e = (dense_generator(a) * t).exp();
  Eigen::Map<const Eigen::VectorXd> p(p0.data(), p0.size());
  Eigen::VectorXd out = e.transpose() * p;
  return {out.data(), out.data() + out.size()};
}

// Exact transition probability under the substochastic truncation, read from
// the dense exponential.
inline double expm_entry(const pmjp::StateSpace& space, const pmjp::Generator& a,
                         const pmjp::State& from, const pmjp::State& to,
                         double t) {
  std::vector<double> p0(space.size(), 0.0);
  long i = space.index(from), j = space.index(to);
  if (i < 0 || j < 0) return 0.0;
  p0[i] = 1.0;
  return expm_transient(p0, a, t)[j];
}

inline double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

inline double sample_variance(const std::vector<double>& x) {
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  const double n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - i / n));
    d = std::max(d, std::abs(f - (i + 1) / n));
  }
  return d;
}

// Asymptotic KS p-value (Kolmogorov distribution tail).
inline double ks_pvalue(double d, double n) {
  double x = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
  return std::clamp(p, 0.0, 1.0);
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double ks_two_sample_pvalue(double d, double n1, double n2) {
  return ks_pvalue(d, n1 * n2 / (n1 + n2));
}

// Normalized density over a 1-D theta grid; returns grid mean and a CDF table
// for KS comparisons.
struct GridPosterior {
  std::vector<double> theta;
  std::vector<double> cdf;
  double mean = 0.0;

  double cdf_at(double t) const {
    auto it = std::upper_bound(theta.begin(), theta.end(), t);
    if (it == theta.begin()) return 0.0;
    std::size_t i = it - theta.begin() - 1;
    return cdf[i];
  }
};

// log_density need not be normalized; trapezoid quadrature on the given grid.
template <typename LogDensity>
GridPosterior grid_posterior(double lo, double hi, int n_grid,
                             LogDensity log_density) {
  GridPosterior out;
  std::vector<double> logf(n_grid);
  out.theta.resize(n_grid);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    out.theta[i] = lo + (hi - lo) * i / (n_grid - 1);
    logf[i] = log_density(out.theta[i]);
    max_log = std::max(max_log, logf[i]);
  }
  std::vector<double> f(n_grid);
  for (int i = 0; i < n_grid; ++i) f[i] = std::exp(logf[i] - max_log);
  double h = (hi - lo) / (n_grid - 1);
  double z = 0.0, m1 = 0.0;
  out.cdf.assign(n_grid, 0.0);
  for (int i = 1; i < n_grid; ++i) {
    double seg = 0.5 * (f[i - 1] + f[i]) * h;
    z += seg;
    m1 += 0.5 * (f[i - 1] * out.theta[i - 1] + f[i] * out.theta[i]) * h;
    out.cdf[i] = z;
  }
  for (double& c : out.cdf) c /= z;
  out.mean = m1 / z;
  return out;
}

}  // namespace oracle

#endif
