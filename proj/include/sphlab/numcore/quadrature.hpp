#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sphlab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule with `points` nodes (Newton iteration on the Legendre
/// recurrence). Thread-safe; the returned reference stays valid for the life
/// of the program.
const GaussLegendreRule& gauss_legendre(std::size_t points);

/// Integral of f over [a, b] with the given rule.
template <class F>
double integrate(F&& f, double a, double b, const GaussLegendreRule& rule) {
  if (!(b > a)) return 0.0;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Node counts and sampling sizes used by the measure and integral routines.
struct QuadratureRule {
  std::size_t nodes_1d = 2048;
  std::size_t nodes_2d = 256;        ///< per axis of the 2-d tensor rule
  std::size_t qmc_points = 1 << 14;  ///< per randomized-QMC replicate (k >= 3)
  std::size_t qmc_replicates = 16;
  std::uint64_t qmc_seed = 0x5eed;
};

}  // namespace sphlab
