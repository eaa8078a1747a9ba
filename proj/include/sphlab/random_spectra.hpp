#pragma once

#include <cstddef>
#include <vector>

#include "sphlab/numcore/matrix.hpp"
#include "sphlab/numcore/rng.hpp"
#include "sphlab/numcore/stats.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

/// Principal cosines lambda_1 <= ... <= lambda_k.
struct SingularSpectrum {
  std::vector<double> values;

  SingularSpectrum() = default;
  /// Sorts the values and checks they lie in [0, 1 + 1e-10].
  explicit SingularSpectrum(std::vector<double> v);

  std::size_t k() const { return values.size(); }
  /// True when some value is 0 or 1 (within `tol`).
  bool degenerate(double tol = 0.0) const;
};

/// The pair (Lambda, U): a spectrum with an independent Haar rotation of R^k.
struct RotationWithSpectrum {
  SingularSpectrum spectrum;
  Matrix rotation;
};

/// Singular values of basis(E)^T basis(H), ascending and clamped to [0, 1].
SingularSpectrum principal_cosines(const Subspace& h, const Subspace& e);

/// Spectrum of a Haar n/2-dimensional H against E = span{e_1..e_k}, with an
/// independent Haar k x k rotation. The spectrum is drawn from the top n/2
/// rows of a Haar n x k frame, which has the same law as the cosines between
/// a Haar H and a fixed E and costs O(n k^2).
RotationWithSpectrum sample_lambda_u(std::size_t n, std::size_t k, RngStream& rng);

/// Square roots of the generalized eigenvalues of N1^T N1 v = mu (N1^T N1 + N2^T N2) v
/// for independent (n/2) x k Gaussian N1, N2.
SingularSpectrum wishart_ratio_spectrum(std::size_t n, std::size_t k, RngStream& rng);

struct GordonInterval {
  double lo;
  double hi;
};

/// sqrt(n/2) -/+ (sqrt(k) + t).
GordonInterval gordon_interval(std::size_t n, std::size_t k, double t);

/// Fraction of (n/2) x k Gaussian matrices whose extreme singular values leave
/// gordon_interval(n, k, t). Trial i uses rng.split(i).
EventFrequency gordon_violation_frequency(std::size_t n, std::size_t k, double t, std::size_t trials,
                                          const RngStream& rng, unsigned threads = 1);

/// max_i |lambda_i - 1/sqrt(2)|.
double lambda_deviation(const SingularSpectrum& s);

/// max over probes x of
/// | |U Lambda^{-1} U^T x|^2 + |U (I - Lambda^2)^{-1/2} U^T x|^2 - 4|x|^2 | / |x|^2.
/// Throws DegenerateInput if some lambda_i is 0 or 1.
double cancellation_defect(const RotationWithSpectrum& lu, const std::vector<std::vector<double>>& probes);

/// Operator-norm form: max |eigenvalue| of U (Lambda^{-2} + (I - Lambda^2)^{-1}) U^T - 4I.
double cancellation_defect_exact(const RotationWithSpectrum& lu);

/// The k standard basis vectors followed by `random_count` uniform unit vectors.
std::vector<std::vector<double>> default_probes(std::size_t k, RngStream& rng, std::size_t random_count = 32);

/// 2^{k/2} C_{n/2,k} / C_{n,k}; 1 for k = 0. Needs k <= n/2 - 1.
double coefficient_ratio(std::size_t n, std::size_t k);
double log_coefficient_ratio(std::size_t n, std::size_t k);

/// Fraction of spectra from sample_lambda_u with
/// C_{n/2,k} sqrt(prod_j 1/(lambda_j sqrt(1 - lambda_j^2))) >= 0.98 C_{n,k}.
/// Degenerate spectra are discarded and counted. Throws HypothesisViolation
/// when k > alpha1 sqrt(n).
EventFrequency coefficient_event_frequency(std::size_t n, std::size_t k, std::size_t trials, const RngStream& rng,
                                           double alpha1 = 0.1, unsigned threads = 1);

}  // namespace sphlab
