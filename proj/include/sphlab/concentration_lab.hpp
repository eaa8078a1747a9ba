#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphlab/numcore/quadrature.hpp"
#include "sphlab/numcore/rng.hpp"
#include "sphlab/numcore/stats.hpp"
#include "sphlab/random_spectra.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

/// A bounded function f on R^k, read through the first k coordinates: either
/// the normalized indicator 1_A / sigma(A) of a coordinate set, the constant
/// 1, or an arbitrary function with a declared sup norm.
class BallDensity {
 public:
  using Function = std::function<double(std::span<const double>)>;

  /// 1_A / sigma_{n-1}(A). Throws DomainError if sigma(A) is zero.
  static BallDensity normalized_indicator(std::size_t n, CoordinateSet a, const QuadratureRule& rule = {});
  static BallDensity constant_one(std::size_t k = 1);
  static BallDensity function(std::size_t k, Function f, double sup_norm, std::string label = "function");

  std::size_t k() const { return k_; }
  double operator()(std::span<const double> x) const;
  double sup_norm() const { return sup_norm_; }
  const std::string& label() const { return label_; }

  /// The underlying set, for indicator densities.
  const std::optional<CoordinateSet>& set() const { return set_; }
  /// sigma(A) for indicators, 1 otherwise.
  double set_measure() const { return measure_; }
  /// For k = 1 indicators of cap/box sets: the x_1 intervals where f = 1/sigma(A).
  std::optional<std::vector<Interval>> support_intervals() const;

 private:
  std::size_t k_ = 1;
  Function f_;
  double sup_norm_ = 1.0;
  double measure_ = 1.0;
  std::optional<CoordinateSet> set_;
  std::string label_;
};

struct GeometricMeanSample {
  enum class Method { direct_mc, reduced_integral };
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t subspace_stream = 0;
  double g_h = 0.0;
  double g_hperp = 0.0;
  double statistic = 0.0;
  /// Delta-method standard error of `statistic` (0 for deterministic quadrature).
  double std_error = 0.0;
  Method method = Method::reduced_integral;
};

/// Monte Carlo estimate of sqrt(sigma_H(A cap H) sigma_{H^perp}(A cap H^perp)) / sigma(A)
/// with `samples` points on each side (independent child streams of rng).
GeometricMeanSample geometric_mean_direct(std::size_t n, const CoordinateSet& a, const Subspace& h,
                                          std::size_t samples, const RngStream& rng,
                                          const QuadratureRule& rule = {});

/// The reduced k-dimensional form: with m = n/2,
/// g_H = C_{m,k} int_{B_k} f(U Lambda U^T x)(1-|x|^2)^{(m-k-2)/2} dx and
/// g_Hperp the same with sqrt(I - Lambda^2); statistic = sqrt(g_H g_Hperp).
/// Exact interval quadrature for k = 1 sets, marginal_expectation otherwise.
GeometricMeanSample reduced_integral_statistic(const BallDensity& f, const RotationWithSpectrum& lu, std::size_t n,
                                               const QuadratureRule& rule = {});

/// The single-integral Cauchy-Schwarz lower bound of the reduced statistic:
/// C_{m,k} / sqrt(prod lambda_j sqrt(1-lambda_j^2)) int f(x) psi(x) dx with
/// psi(x) = (1-|Lambda^{-1}U^T x|^2)_+^{(m-k-2)/4} (1-|(I-Lambda^2)^{-1/2}U^T x|^2)_+^{(m-k-2)/4}.
Estimate cauchy_schwarz_bound(const BallDensity& f, const RotationWithSpectrum& lu, std::size_t n,
                              const QuadratureRule& rule = {});

/// log psi(x) for x in R^k (-infinity outside the support).
double log_psi(std::span<const double> x, const RotationWithSpectrum& lu, std::size_t n);

struct TheoremEventResult {
  EventFrequency event;            ///< statistic >= threshold
  EventFrequency bound_event;      ///< Cauchy-Schwarz bound >= threshold
  std::vector<double> statistics;  ///< per draw, in trial order
  std::vector<double> bounds;      ///< per draw, in trial order
  std::vector<std::string> violations;
};

struct TheoremEventOptions {
  double threshold = 0.9;
  double alpha1 = 0.1;
  double alpha2 = 0.5;
  /// When false, hypothesis violations are recorded instead of thrown.
  bool enforce_hypotheses = true;
  bool compute_bounds = true;
  unsigned threads = 1;
  QuadratureRule rule{};
};

/// Frequency over independent (Lambda, U) draws (trial i uses rng.split(i))
/// of reduced_integral_statistic >= threshold. Checks k <= alpha1 sqrt(n) and
/// ||f||_inf <= e^{alpha2 sqrt(n)} before sampling.
TheoremEventResult theorem_event_frequency(std::size_t n, const BallDensity& f, std::size_t trials,
                                           const RngStream& rng, const TheoremEventOptions& options = {});

struct SmallBallResult {
  bool applicable = false;  ///< spectrum inside the concentration window
  double ratio = 0.0;       ///< min over probes of psi(x) / (1-|x|^2)^{(n-k-2)/2}
  double deviation = 0.0;   ///< max |lambda_i - 1/sqrt(2)|
  double window = 0.0;      ///< C (sqrt(alpha1) + sqrt(2)) / n^{1/4}
  double radius = 0.0;      ///< rho n^{-1/4}
};

/// Probe points of rho n^{-1/4} B_k: the origin, +-radius e_i, +-radius U e_i and
/// `random_count` further points (half on the sphere of that radius, half inside).
std::vector<std::vector<double>> small_ball_probes(const RotationWithSpectrum& lu, double radius, RngStream& rng,
                                                   std::size_t random_count = 64);

/// Throws HypothesisViolation when rho n^{-1/4} > 1/10 (outside the expansion
/// window of psi) and DegenerateInput for a degenerate spectrum.
SmallBallResult small_ball_ratio(const RotationWithSpectrum& lu, std::size_t n, double rho,
                                 const std::vector<std::vector<double>>& probes, double alpha1 = 0.1,
                                 double window_constant = 1.0);

struct SmallBallFrequency {
  EventFrequency event;  ///< all draws in the denominator; not-applicable draws count as misses
  std::size_t not_applicable = 0;
  std::vector<double> ratios;
};

SmallBallFrequency small_ball_event_frequency(std::size_t n, std::size_t k, double rho, std::size_t trials,
                                              const RngStream& rng, double threshold = 0.95, double alpha1 = 0.1,
                                              unsigned threads = 1);

struct TailBoundReport {
  std::size_t n = 0;
  std::size_t k = 0;
  double rho = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double analytic_bound = 0.0;  ///< (2 alpha1 / rho^2) e^{-alpha2 sqrt(n)}
  double brute_value = 0.0;     ///< e^{alpha2 sqrt(n)} C_{n,k} int_{|x| >= rho n^{-1/4}} (1-|x|^2)_+^{(n-k-2)/2}
  double tail_mass = 0.0;       ///< brute_value without the e^{alpha2 sqrt(n)} factor
  std::vector<std::string> violations;

  bool holds() const { return brute_value <= analytic_bound; }
};

/// Evaluates the tail bound without checking its preconditions; violations
/// are listed in the report.
TailBoundReport evaluate_tail(std::size_t n, std::size_t k, double rho, double alpha1, double alpha2);

/// As evaluate_tail, but throws HypothesisViolation naming the first failed
/// precondition (k <= alpha1 sqrt(n), alpha1 <= rho^2/6, 2 alpha2 < rho^2/3 - alpha1 log(rho sqrt(e/alpha1))).
TailBoundReport laplace_tail_bound(std::size_t n, std::size_t k, double rho, double alpha1, double alpha2);

/// Both sides of C_{n,k} Vol(B_k) = ((n-k)/n) Gamma(n/2+1) / (Gamma(k/2+1) Gamma((n-k)/2+1)).
struct IdentityCheck {
  double lhs;
  double rhs;
};
IdentityCheck coarea_ball_identity(std::size_t n, std::size_t k);

}  // namespace sphlab
