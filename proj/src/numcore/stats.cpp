#include "sphlab/numcore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sphlab/errors.hpp"

namespace sphlab {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw DomainError("median of an empty sample");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lower + upper);
}

Estimate mean_estimate(std::span<const double> xs) {
  return {mean(xs), xs.empty() ? 0.0 : std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()))};
}

Estimate binomial_estimate(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw DomainError("binomial_estimate: zero trials");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

Estimate EventFrequency::estimate() const { return binomial_estimate(hits, trials); }

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double chi_square_pvalue(double statistic, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi_square_pvalue: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi_square_uniform_pvalue(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw DomainError("chi_square_uniform_pvalue: need at least two cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return chi_square_pvalue(stat, static_cast<double>(counts.size() - 1));
}

double chi_square_homogeneity_pvalue(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw DomainError("chi_square_homogeneity_pvalue: bin counts differ");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::size_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::size_t{0}));
  double stat = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double total = static_cast<double>(a[i] + b[i]);
    if (total == 0.0) continue;
    ++used;
    const double ea = total * na / (na + nb);
    const double eb = total * nb / (na + nb);
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
  }
  if (used < 2) return 1.0;
  return chi_square_pvalue(stat, static_cast<double>(used - 1));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p outside (0, 1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

double beta_quantile(double a, double b, double p) { return boost::math::ibeta_inv(a, b, p); }

}  // namespace sphlab
