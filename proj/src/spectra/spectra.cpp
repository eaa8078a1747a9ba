#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/numcore/parallel.hpp"
#include "sphlab/random_spectra.hpp"

namespace sphlab {

SingularSpectrum::SingularSpectrum(std::vector<double> v) : values(std::move(v)) {
  std::sort(values.begin(), values.end());
  for (double x : values)
    if (!(x >= 0.0 && x <= 1.0 + 1e-10)) throw DomainError("SingularSpectrum: cosine outside [0, 1]");
}

bool SingularSpectrum::degenerate(double tol) const {
  return std::any_of(values.begin(), values.end(), [tol](double x) { return x <= tol || x >= 1.0 - tol; });
}

namespace {

SingularSpectrum clamped(std::vector<double> v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return SingularSpectrum(std::move(v));
}

void check_half(std::size_t n, std::size_t k, const char* who) {
  if (k == 0 || 2 * k > n) throw DomainError(std::string(who) + ": need 1 <= k <= n/2");
}

}  // namespace

SingularSpectrum principal_cosines(const Subspace& h, const Subspace& e) {
  if (h.ambient_dim() != e.ambient_dim()) throw DomainError("principal_cosines: ambient dimensions differ");
  if (e.dim() > h.dim()) throw DomainError("principal_cosines: dim(E) exceeds dim(H)");
  // (E^T H)^T = H^T E is dim(H) x k, tall as singular_values_small expects.
  return clamped(singular_values_small(multiply_tn(h.basis(), e.basis())));
}

RotationWithSpectrum sample_lambda_u(std::size_t n, std::size_t k, RngStream& rng) {
  check_half(n, k, "sample_lambda_u");
  const Matrix frame = orthonormalize(gaussian_matrix(n, k, rng));
  RotationWithSpectrum out;
  out.spectrum = clamped(singular_values_small(frame.top_rows(n / 2)));
  out.rotation = sample_orthogonal(k, rng);
  return out;
}

SingularSpectrum wishart_ratio_spectrum(std::size_t n, std::size_t k, RngStream& rng) {
  check_half(n, k, "wishart_ratio_spectrum");
  const Matrix n1 = gaussian_matrix(n / 2, k, rng);
  const Matrix n2 = gaussian_matrix(n / 2, k, rng);
  const Matrix a = multiply_tn(n1, n1);
  const Matrix b = a + multiply_tn(n2, n2);
  auto mu = generalized_symmetric_eigenvalues(a, b);
  for (double& m : mu) m = std::sqrt(std::clamp(m, 0.0, 1.0));
  return SingularSpectrum(std::move(mu));
}

GordonInterval gordon_interval(std::size_t n, std::size_t k, double t) {
  if (2 * k > n) throw DomainError("gordon_interval: need k <= n/2");
  if (!(t >= 0.0)) throw DomainError("gordon_interval: need t >= 0");
  const double centre = std::sqrt(0.5 * static_cast<double>(n));
  const double spread = std::sqrt(static_cast<double>(k)) + t;
  return {centre - spread, centre + spread};
}

EventFrequency gordon_violation_frequency(std::size_t n, std::size_t k, double t, std::size_t trials,
                                          const RngStream& rng, unsigned threads) {
  check_half(n, k, "gordon_violation_frequency");
  const auto iv = gordon_interval(n, k, t);
  const auto outside = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto s = singular_values_small(gaussian_matrix(n / 2, k, r));
    return static_cast<int>(s.front() < iv.lo || s.back() > iv.hi);
  });
  EventFrequency f;
  f.trials = trials;
  for (int o : outside) f.hits += static_cast<std::size_t>(o);
  return f;
}

double lambda_deviation(const SingularSpectrum& s) {
  double d = 0.0;
  for (double x : s.values) d = std::max(d, std::abs(x - std::numbers::sqrt2 / 2.0));
  return d;
}

namespace {

// Diagonal of Lambda^{-2} + (I - Lambda^2)^{-1}.
std::vector<double> cancellation_weights(const SingularSpectrum& s) {
  if (s.degenerate()) throw DegenerateInput("cancellation_defect: spectrum contains 0 or 1");
  std::vector<double> w;
  for (double l : s.values) {
    const double l2 = l * l;
    w.push_back(1.0 / l2 + 1.0 / (1.0 - l2));
  }
  return w;
}

}  // namespace

double cancellation_defect(const RotationWithSpectrum& lu, const std::vector<std::vector<double>>& probes) {
  const auto w = cancellation_weights(lu.spectrum);
  const std::size_t k = w.size();
  if (lu.rotation.rows() != k || lu.rotation.cols() != k) throw DomainError("cancellation_defect: rotation size");
  double worst = 0.0;
  for (const auto& x : probes) {
    if (x.size() != k) throw DomainError("cancellation_defect: probe dimension");
    const double x2 = squared_norm(x);
    if (x2 == 0.0) continue;
    const auto y = multiply_t(lu.rotation, x);
    double inv_sum = 0.0;
    double comp_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double l2 = lu.spectrum.values[i] * lu.spectrum.values[i];
      inv_sum += y[i] * y[i] / l2;
      comp_sum += y[i] * y[i] / (1.0 - l2);
    }
    worst = std::max(worst, std::abs(inv_sum + comp_sum - 4.0 * x2) / x2);
  }
  return worst;
}

double cancellation_defect_exact(const RotationWithSpectrum& lu) {
  // U is orthogonal, so the eigenvalues of U W U^T - 4I are w_i - 4.
  double worst = 0.0;
  for (double w : cancellation_weights(lu.spectrum)) worst = std::max(worst, std::abs(w - 4.0));
  return worst;
}

std::vector<std::vector<double>> default_probes(std::size_t k, RngStream& rng, std::size_t random_count) {
  std::vector<std::vector<double>> probes;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> e(k, 0.0);
    e[i] = 1.0;
    probes.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < random_count; ++j) {
    const auto u = sample_unit_sphere(k, rng);
    probes.emplace_back(u.coords().begin(), u.coords().end());
  }
  return probes;
}

double log_coefficient_ratio(std::size_t n, std::size_t k) {
  if (k == 0) return 0.0;
  if (k + 1 > n || 2 * (k + 1) > n) throw DomainError("coefficient_ratio: need k <= n/2 - 1");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return 0.5 * kd * std::numbers::ln2 + log_coarea_constant(0.5 * nd, kd) - log_coarea_constant(nd, kd);
}

double coefficient_ratio(std::size_t n, std::size_t k) { return std::exp(log_coefficient_ratio(n, k)); }

EventFrequency coefficient_event_frequency(std::size_t n, std::size_t k, std::size_t trials, const RngStream& rng,
                                           double alpha1, unsigned threads) {
  if (static_cast<double>(k) > alpha1 * std::sqrt(static_cast<double>(n)))
    throw HypothesisViolation("k > alpha1*sqrt(n) violates the coefficient-event hypothesis");
  if (2 * (k + 1) > n) throw DomainError("coefficient_event_frequency: need k <= n/2 - 1");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double rhs = std::log(0.98) + log_coarea_constant(nd, kd);
  const double lhs_const = log_coarea_constant(0.5 * nd, kd);
  // 1 = event, 0 = no event, -1 = degenerate draw
  const auto outcome = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto lu = sample_lambda_u(n, k, r);
    if (lu.spectrum.degenerate()) return -1;
    double s = 0.0;
    for (double l : lu.spectrum.values) s -= std::log(l) + 0.5 * std::log1p(-l * l);
    return lhs_const + 0.5 * s >= rhs ? 1 : 0;
  });
  EventFrequency f;
  for (int o : outcome) {
    if (o < 0) {
      ++f.discarded;
      continue;
    }
    ++f.trials;
    f.hits += static_cast<std::size_t>(o);
  }
  return f;
}

}  // namespace sphlab
