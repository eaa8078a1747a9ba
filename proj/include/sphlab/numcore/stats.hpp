#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sphlab {

/// A point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

double mean(std::span<const double> xs);
/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);
double median(std::vector<double> xs);

/// Counts from a repeated yes/no experiment. Trials dropped because of a
/// degenerate draw are kept apart from the denominator.
struct EventFrequency {
  std::size_t hits = 0;
  std::size_t trials = 0;
  std::size_t discarded = 0;

  double value() const { return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials); }
  Estimate estimate() const;
};

/// Sample mean with standard error s / sqrt(n).
Estimate mean_estimate(std::span<const double> xs);
/// Frequency with binomial standard error sqrt(p (1 - p) / trials).
Estimate binomial_estimate(std::size_t successes, std::size_t trials);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Upper tail P(chi^2_dof >= statistic).
double chi_square_pvalue(double statistic, double dof);
/// Goodness of fit of `counts` to equal cell probabilities.
double chi_square_uniform_pvalue(std::span<const std::size_t> counts);
/// Test that two histograms over the same bins come from one distribution.
/// Bins empty in both samples are skipped.
double chi_square_homogeneity_pvalue(std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);
/// log Gamma(x) for x > 0 (thread-safe, unlike std::lgamma).
double log_gamma(double x);
/// Inverse of the regularized incomplete beta function I_x(a, b) in x.
double beta_quantile(double a, double b, double p);

}  // namespace sphlab
