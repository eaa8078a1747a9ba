#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sphlab/numcore/matrix.hpp"
#include "sphlab/numcore/rng.hpp"
#include "sphlab/numcore/stats.hpp"
#include "sphlab/random_spectra.hpp"
#include "sphlab/sphere_geometry.hpp"
#include "sphlab/vsp_protocol.hpp"

namespace sphlab {

/// A measurable subset B of G_{n/2}: everything, or subspaces whose principal
/// cosines against a fixed reference frame satisfy a predicate.
class GrassmannianSubset {
 public:
  using SpectrumPredicate = std::function<bool(const SingularSpectrum&)>;

  static GrassmannianSubset all();
  /// `reference` is an orthonormal n x r basis; membership tests the principal
  /// cosines of H against it.
  static GrassmannianSubset spectral_window(Matrix reference, SpectrumPredicate predicate, std::string label);

  bool contains(const Subspace& h) const;
  bool is_all() const { return !predicate_; }
  const std::string& label() const { return label_; }
  const Matrix& reference() const { return reference_; }

  /// {H : H^perp in B}. Exchanges the roles of mu1 and mu2.
  GrassmannianSubset swapped() const;
  /// {R H : H in B}, i.e. the reference frame moved by R.
  GrassmannianSubset rotated(const Matrix& r) const;

 private:
  Matrix reference_;
  SpectrumPredicate predicate_;
  bool swapped_ = false;
  std::string label_ = "all";
};

/// Q = A x B. A lives on the first k coordinates of the frame `frame`
/// (identity when unset), so A's points are R x with x in the coordinate set.
struct Rectangle {
  CoordinateSet a;
  GrassmannianSubset b = GrassmannianSubset::all();
  std::optional<Matrix> frame;

  /// Moves A's frame and B's reference together by R.
  Rectangle rotated(const Matrix& r) const;
};

struct MeasureTriple {
  Estimate mu0;  ///< sigma(A) sigma_G(B)
  Estimate mu1;  ///< int_B sigma_H(A cap H)
  Estimate mu2;  ///< int_B sigma_{H^perp}(A cap H^perp)
  /// int_B sqrt(sigma_H sigma_{H^perp}) from the same draws; never exceeds sqrt(mu1 mu2).
  Estimate cs_integral;
  /// Standard error of sqrt(mu1 mu2) (delta method with the mu1/mu2 covariance).
  double geometric_mean_error = 0.0;
  std::size_t subspace_trials = 0;
  std::size_t accepted = 0;

  double acceptance() const {
    return subspace_trials == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(subspace_trials);
  }
};

/// Membership of all H draws is decided first; if fewer than 1e-3 of them lie
/// in B the call throws DegenerateInput before any point sampling. Draw i uses
/// rng.split(i); the H side and the H^perp side use further children.
MeasureTriple measure_rectangle(const Rectangle& q, std::size_t n, std::size_t subspace_trials,
                                std::size_t point_samples, const RngStream& rng, unsigned threads = 1);

struct RectangleParams {
  std::size_t subspace_trials = 200;
  std::size_t point_samples = 10000;
  double alpha1 = 0.1;
  unsigned threads = 1;
};

struct RectangleCheck {
  double lhs = 0.0;        ///< sqrt(mu1 mu2)
  double rhs = 0.0;        ///< 0.8 mu0
  double std_error = 0.0;  ///< of lhs
  bool pass = false;       ///< lhs + 3 std_error >= rhs
  MeasureTriple measures;
};

/// Throws HypothesisViolation when A depends on more than alpha1 sqrt(n) coordinates.
RectangleCheck rectangle_inequality_check(const Rectangle& q, std::size_t n, const RectangleParams& params,
                                          const RngStream& rng);

struct AuditRectangle {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  Side answer = Side::in_h;  ///< the protocol's output on this rectangle
};

struct ClassChain {
  double sum_geometric = 0.0;  ///< sum over the class of sqrt(mu1 mu2)
  double chain = 0.0;          ///< sqrt(sum mu1 * sum mu2), bounds sum_geometric
  double error_bound = 0.0;    ///< sqrt(1 * error_target)
  double error_mass = 0.0;     ///< measure of wrong answers in the class (mu2 on in-H, mu1 on in-H-perp)
};

struct PartitionAudit {
  ClassChain in_h;
  ClassChain in_hperp;
  double total_geometric = 0.0;  ///< sum over all rectangles of sqrt(mu1 mu2)
  std::size_t bits = 0;          ///< ceil(log2 #rectangles)
  /// 0.8 - 2^bits C e^{-alpha2 sqrt(n)}, the lower estimate of total_geometric.
  double lower_estimate = 0.0;
  /// 2 sqrt(error_target), the upper estimate for an error_target-correct protocol.
  double upper_estimate = 0.0;
  /// lower_estimate > upper_estimate: no protocol with this many bits reaches the error target.
  bool contradiction = false;
  /// D >= log2((0.8 - 2 sqrt(eps)) / C) + alpha2 sqrt(n) log2 e; NaN when 0.8 <= 2 sqrt(eps).
  double bound_bits = 0.0;
  bool bound_feasible = false;
};

/// Checks the counting chain of the lower bound on the given partition.
/// Throws DomainError unless sum mu0 = 1 within 0.01.
PartitionAudit partition_audit(const std::vector<AuditRectangle>& rectangles, double error_target, std::size_t n,
                               double c = 1.0, double alpha2 = 0.005);

/// log2((0.8 - 2 sqrt(eps)) / C) + alpha2 sqrt(n) log2 e.
double bits_lower_bound(double error_target, std::size_t n, double c, double alpha2);

/// 2^d equal rectangles with mu0 = mu1 = mu2 = 2^{-d}, answers alternating.
std::vector<AuditRectangle> synthetic_partition(std::size_t d);

}  // namespace sphlab
