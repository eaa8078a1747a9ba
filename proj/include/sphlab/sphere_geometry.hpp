#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphlab/numcore/matrix.hpp"
#include "sphlab/numcore/quadrature.hpp"
#include "sphlab/numcore/rng.hpp"
#include "sphlab/numcore/stats.hpp"

namespace sphlab {

/// A point of the unit sphere S^{n-1}; the norm is checked on construction.
class UnitVector {
 public:
  /// Throws DomainError unless |coords| = 1 within 1e-10.
  explicit UnitVector(std::vector<double> coords);
  /// Scales a nonzero vector to unit length.
  static UnitVector normalized(std::vector<double> v);

  std::size_t ambient_dim() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
};

/// A linear subspace of R^n held as an n x d orthonormal basis.
class Subspace {
 public:
  /// Throws DomainError unless basis^T basis = I within 1e-10.
  explicit Subspace(Matrix basis);
  /// span{e_1, ..., e_k} in R^n.
  static Subspace coordinate(std::size_t n, std::size_t k);

  std::size_t ambient_dim() const { return basis_.rows(); }
  std::size_t dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

  /// Coordinates of the projection of x in this basis (basis^T x).
  std::vector<double> coordinates_of(std::span<const double> x) const;
  /// |Proj x|^2.
  double projection_norm2(std::span<const double> x) const;
  /// basis * y.
  std::vector<double> embed(std::span<const double> y) const;
  /// The subspace R * this for an orthogonal n x n matrix R.
  Subspace rotated(const Matrix& r) const;

 private:
  Matrix basis_;
};

struct Interval {
  double lo;
  double hi;
};
using Box = std::vector<Interval>;

/// A subset A of S^{n-1} determined by the first k coordinates:
/// A = {x : (x_1, ..., x_k) in I} for a region I of the ball B_k.
class CoordinateSet {
 public:
  enum class Kind { cap, box, union_of_boxes, predicate };
  using Predicate = std::function<bool(std::span<const double>)>;

  /// {x : x_1 >= threshold}.
  static CoordinateSet cap(double threshold);
  /// Product of intervals; k is the number of intervals.
  static CoordinateSet box(Box intervals);
  static CoordinateSet union_of_boxes(std::vector<Box> boxes);
  static CoordinateSet predicate(std::size_t k, Predicate membership, std::string label = "predicate");
  /// Every point of the sphere ([-1, 1]^k).
  static CoordinateSet whole(std::size_t k = 1);

  Kind kind() const { return kind_; }
  std::size_t k() const { return k_; }
  double threshold() const { return threshold_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::string& label() const { return label_; }

  /// Membership of a point; only its first k coordinates are read.
  bool contains(std::span<const double> point) const;
  /// True when the set contains all of B_k.
  bool covers_ball() const;
  /// For k = 1 sets other than predicates: disjoint sorted intervals of x_1
  /// whose union is the set (clipped to [-1, 1]).
  std::vector<Interval> intervals_1d() const;

 private:
  CoordinateSet() = default;

  Kind kind_ = Kind::box;
  std::size_t k_ = 1;
  double threshold_ = 0.0;
  std::vector<Box> boxes_;
  Predicate predicate_;
  std::string label_;
};

/// The analytic constants alpha1, alpha2, rho shared by the concentration
/// statements, with the checks the experiments rely on.
struct AnalyticConstants {
  double alpha1 = 0.1;
  double alpha2 = default_alpha2(0.1, 0.5);
  double rho = 0.5;

  /// Half of rho^2/3 - alpha1 log(rho sqrt(e/alpha1)): alpha2 must stay
  /// strictly below this for the Laplace tail bound. May be negative.
  static double alpha2_upper(double alpha1, double rho);
  /// Half of alpha2_upper when that is positive, 0.005 otherwise.
  static double default_alpha2(double alpha1, double rho);

  /// k <= alpha1 sqrt(n).
  bool coordinate_count_ok(std::size_t n, std::size_t k) const;
  /// Human-readable descriptions of every Laplace-tail precondition the
  /// constants (with n, k) fail; empty when all hold.
  std::vector<std::string> tail_violations(std::size_t n, std::size_t k) const;
  /// Throws DomainError unless all constants are positive and finite.
  void validate() const;
};

UnitVector sample_unit_sphere(std::size_t n, RngStream& rng);
/// Haar-uniform d-dimensional subspace of R^n.
Subspace sample_grassmannian(std::size_t n, std::size_t d, RngStream& rng);
/// Haar-uniform d x d orthogonal matrix.
Matrix sample_orthogonal(std::size_t d, RngStream& rng);
Subspace complement(const Subspace& h);

/// psi(x, theta) = (x, sqrt(1 - |x|^2) theta) for x in B_k, theta in S^{m-k-1}.
UnitVector lift_from_ball(std::span<const double> x, const UnitVector& theta);

double ball_volume(std::size_t k);
double log_ball_volume(double k);
/// C_{m,k} = (m - k) Vol(B_{m-k}) / (m Vol(B_m)), 1 <= k <= m - 1.
double coarea_constant(std::size_t m, std::size_t k);
/// log C_{m,k}; m may be any real with m > k.
double log_coarea_constant(double m, double k);

/// sigma_{m-1}({x : lo <= x_1 <= hi}) for real m >= 2, by Gauss-Legendre
/// quadrature after the substitution x_1 = sin(phi).
double interval_measure(double m, double lo, double hi, std::size_t nodes = 2048);

/// E[g(X)] where X is the vector of the first k coordinates of a uniform point
/// of S^{m-1} (density C_{m,k} (1 - |x|^2)^{(m-k-2)/2} on B_k). Deterministic
/// quadrature for k = 1, 2 (std_error 0); randomized QMC for k >= 3.
Estimate marginal_expectation(double m, std::size_t k, const std::function<double(std::span<const double>)>& g,
                              const QuadratureRule& rule = {});

/// Integral of g over the unit ball B_k. Polar Gauss-Legendre for k <= 2,
/// randomized QMC for k >= 3.
Estimate ball_integral(std::size_t k, const std::function<double(std::span<const double>)>& g,
                       const QuadratureRule& rule = {});

struct MeasureResult {
  enum class Method { exact, gauss_legendre, inclusion_exclusion, quasi_monte_carlo };
  double value = 0.0;
  double std_error = 0.0;
  bool coarse_warning = false;
  Method method = Method::exact;
};

/// sigma_{n-1}(A) through the coarea formula: C_{n,k} times the integral of
/// (1 - |x|^2)^{(n-k-2)/2} over the region of B_k that defines A.
MeasureResult coordinate_set_measure(std::size_t n, const CoordinateSet& a, const QuadratureRule& rule = {});

/// Cap threshold T with sigma_{n-1}({x_1 >= T}) = sigma, by bisection to 1e-12.
double cap_threshold_for_measure(std::size_t n, double sigma);

/// Monte Carlo estimate of sigma_H(A cap H): uniform points of S^{n-1} cap H,
/// membership frequency with its binomial standard error.
Estimate restricted_measure_mc(const CoordinateSet& a, const Subspace& h, std::size_t samples, RngStream& rng);

}  // namespace sphlab
