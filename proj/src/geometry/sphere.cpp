#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

UnitVector::UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DomainError("UnitVector: empty coordinate vector");
  const double r = norm(coords_);
  if (!(std::abs(r - 1.0) <= 1e-10)) throw DomainError("UnitVector: norm differs from 1 by more than 1e-10");
}

UnitVector UnitVector::normalized(std::vector<double> v) {
  const double r = norm(v);
  if (!(r > 0.0) || !std::isfinite(r)) throw DegenerateInput("UnitVector::normalized: zero or non-finite vector");
  for (double& x : v) x /= r;
  return UnitVector(std::move(v));
}

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() > basis_.rows()) throw DomainError("Subspace: more basis vectors than ambient dimensions");
  if (basis_.cols() > 0 && !(orthonormality_defect(basis_) <= 1e-10))
    throw DomainError("Subspace: basis is not orthonormal to 1e-10");
}

Subspace Subspace::coordinate(std::size_t n, std::size_t k) {
  if (k > n) throw DomainError("Subspace::coordinate: k exceeds n");
  Matrix b(n, k);
  for (std::size_t i = 0; i < k; ++i) b(i, i) = 1.0;
  return Subspace(std::move(b));
}

std::vector<double> Subspace::coordinates_of(std::span<const double> x) const {
  if (x.size() != ambient_dim()) throw DomainError("Subspace: dimension mismatch");
  return multiply_t(basis_, x);
}

double Subspace::projection_norm2(std::span<const double> x) const { return squared_norm(coordinates_of(x)); }

std::vector<double> Subspace::embed(std::span<const double> y) const {
  if (y.size() != dim()) throw DomainError("Subspace::embed: dimension mismatch");
  return multiply(basis_, y);
}

Subspace Subspace::rotated(const Matrix& r) const {
  if (r.rows() != ambient_dim() || r.cols() != ambient_dim()) throw DomainError("Subspace::rotated: bad rotation size");
  return Subspace(r * basis_);
}

// CoordinateSet

CoordinateSet CoordinateSet::cap(double threshold) {
  if (!std::isfinite(threshold)) throw DomainError("CoordinateSet::cap: threshold must be finite");
  CoordinateSet s;
  s.kind_ = Kind::cap;
  s.k_ = 1;
  s.threshold_ = threshold;
  std::ostringstream os;
  os << "cap:T=" << threshold;
  s.label_ = os.str();
  return s;
}

namespace {

void check_box(const Box& b) {
  if (b.empty()) throw DomainError("CoordinateSet: box with no intervals");
  for (const auto& iv : b)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
      throw DomainError("CoordinateSet: box interval must satisfy lo <= hi");
}

bool in_box(const Box& b, std::span<const double> x) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (x[i] < b[i].lo || x[i] > b[i].hi) return false;
  return true;
}

}  // namespace

CoordinateSet CoordinateSet::box(Box intervals) {
  check_box(intervals);
  CoordinateSet s;
  s.kind_ = Kind::box;
  s.k_ = intervals.size();
  s.boxes_.push_back(std::move(intervals));
  s.label_ = "box";
  return s;
}

CoordinateSet CoordinateSet::union_of_boxes(std::vector<Box> boxes) {
  if (boxes.empty()) throw DomainError("CoordinateSet::union_of_boxes: no boxes");
  for (const auto& b : boxes) {
    check_box(b);
    if (b.size() != boxes.front().size()) throw DomainError("CoordinateSet::union_of_boxes: boxes differ in k");
  }
  CoordinateSet s;
  s.kind_ = Kind::union_of_boxes;
  s.k_ = boxes.front().size();
  s.boxes_ = std::move(boxes);
  s.label_ = "union";
  return s;
}

CoordinateSet CoordinateSet::predicate(std::size_t k, Predicate membership, std::string label) {
  if (k == 0) throw DomainError("CoordinateSet::predicate: k must be positive");
  if (!membership) throw DomainError("CoordinateSet::predicate: empty predicate");
  CoordinateSet s;
  s.kind_ = Kind::predicate;
  s.k_ = k;
  s.predicate_ = std::move(membership);
  s.label_ = std::move(label);
  return s;
}

CoordinateSet CoordinateSet::whole(std::size_t k) {
  if (k == 0) throw DomainError("CoordinateSet::whole: k must be positive");
  auto s = box(Box(k, Interval{-1.0, 1.0}));
  s.label_ = "all";
  return s;
}

bool CoordinateSet::contains(std::span<const double> point) const {
  if (point.size() < k_) throw DomainError("CoordinateSet::contains: point has fewer than k coordinates");
  switch (kind_) {
    case Kind::cap:
      return point[0] >= threshold_;
    case Kind::box:
    case Kind::union_of_boxes:
      return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return in_box(b, point); });
    case Kind::predicate:
      return predicate_(point.first(k_));
  }
  return false;
}

bool CoordinateSet::covers_ball() const {
  if (kind_ == Kind::cap) return threshold_ <= -1.0;
  if (kind_ == Kind::predicate) return false;
  return std::any_of(boxes_.begin(), boxes_.end(), [](const Box& b) {
    return std::all_of(b.begin(), b.end(), [](const Interval& iv) { return iv.lo <= -1.0 && iv.hi >= 1.0; });
  });
}

std::vector<Interval> CoordinateSet::intervals_1d() const {
  if (k_ != 1 || kind_ == Kind::predicate) throw DomainError("CoordinateSet::intervals_1d: needs a k = 1 cap or box set");
  std::vector<Interval> raw;
  if (kind_ == Kind::cap) {
    raw.push_back({std::max(threshold_, -1.0), 1.0});
  } else {
    for (const auto& b : boxes_) raw.push_back({std::max(b[0].lo, -1.0), std::min(b[0].hi, 1.0)});
  }
  std::erase_if(raw, [](const Interval& iv) { return iv.lo > iv.hi; });
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : raw) {
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  return merged;
}

// AnalyticConstants

double AnalyticConstants::alpha2_upper(double alpha1, double rho) {
  return 0.5 * (rho * rho / 3.0 - alpha1 * std::log(rho * std::sqrt(std::numbers::e / alpha1)));
}

double AnalyticConstants::default_alpha2(double alpha1, double rho) {
  const double cap = alpha2_upper(alpha1, rho);
  return cap > 0.0 ? 0.5 * cap : 0.005;
}

bool AnalyticConstants::coordinate_count_ok(std::size_t n, std::size_t k) const {
  return static_cast<double>(k) <= alpha1 * std::sqrt(static_cast<double>(n));
}

std::vector<std::string> AnalyticConstants::tail_violations(std::size_t n, std::size_t k) const {
  std::vector<std::string> out;
  if (!coordinate_count_ok(n, k)) {
    std::ostringstream os;
    os << "k <= alpha1*sqrt(n) fails: k=" << k << ", alpha1*sqrt(n)=" << alpha1 * std::sqrt(static_cast<double>(n));
    out.push_back(os.str());
  }
  if (alpha1 > rho * rho / 6.0) {
    std::ostringstream os;
    os << "alpha1 <= rho^2/6 fails: alpha1=" << alpha1 << ", rho^2/6=" << rho * rho / 6.0;
    out.push_back(os.str());
  }
  const double cap = alpha2_upper(alpha1, rho);
  if (!(alpha2 < cap)) {
    std::ostringstream os;
    os << "2*alpha2 < rho^2/3 - alpha1*log(rho*sqrt(e/alpha1)) fails: 2*alpha2=" << 2.0 * alpha2
       << ", right side=" << 2.0 * cap;
    out.push_back(os.str());
  }
  return out;
}

void AnalyticConstants::validate() const {
  for (double v : {alpha1, alpha2, rho})
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("AnalyticConstants: alpha1, alpha2, rho must be positive");
}

// Sampling

UnitVector sample_unit_sphere(std::size_t n, RngStream& rng) {
  if (n == 0) throw DomainError("sample_unit_sphere: n must be at least 1");
  std::vector<double> g(n);
  for (;;) {
    for (double& x : g) x = rng.normal();
    const double r = norm(g);
    if (r >= 1e-300) {
      for (double& x : g) x /= r;
      return UnitVector(std::move(g));
    }
  }
}

Subspace sample_grassmannian(std::size_t n, std::size_t d, RngStream& rng) {
  if (d < 1 || d > n) throw DomainError("sample_grassmannian: need 1 <= d <= n");
  return Subspace(orthonormalize(gaussian_matrix(n, d, rng)));
}

Matrix sample_orthogonal(std::size_t d, RngStream& rng) {
  if (d == 0) throw DomainError("sample_orthogonal: d must be positive");
  if (d == 1) return Matrix{{rng.normal() < 0.0 ? -1.0 : 1.0}};
  return orthonormalize(gaussian_matrix(d, d, rng));
}

Subspace complement(const Subspace& h) { return Subspace(complement_basis(h.basis())); }

UnitVector lift_from_ball(std::span<const double> x, const UnitVector& theta) {
  const double r2 = squared_norm(x);
  if (std::sqrt(r2) > 1.0 + 1e-12) throw DomainError("lift_from_ball: |x| > 1");
  const double s = std::sqrt(std::max(0.0, 1.0 - r2));
  std::vector<double> out(x.begin(), x.end());
  out.reserve(x.size() + theta.ambient_dim());
  for (double t : theta.coords()) out.push_back(s * t);
  // |x| may exceed 1 by up to 1e-12; rescale so the result is exactly unit length.
  if (r2 > 1.0) {
    const double r = std::sqrt(r2);
    for (double& v : out) v /= r;
  }
  return UnitVector(std::move(out));
}

// Constants

double log_ball_volume(double k) {
  if (k < 0.0) throw DomainError("ball_volume: negative dimension");
  return 0.5 * k * std::log(std::numbers::pi) - log_gamma(0.5 * k + 1.0);
}

double ball_volume(std::size_t k) { return std::exp(log_ball_volume(static_cast<double>(k))); }

double log_coarea_constant(double m, double k) {
  if (!(k >= 1.0) || !(k < m)) throw DomainError("coarea_constant: need 1 <= k <= m - 1");
  // (m-k)Vol(B_{m-k}) / (m Vol(B_m)) = pi^{-k/2} Gamma(m/2) / Gamma((m-k)/2)
  return -0.5 * k * std::log(std::numbers::pi) + log_gamma(0.5 * m) - log_gamma(0.5 * (m - k));
}

double coarea_constant(std::size_t m, std::size_t k) {
  if (k < 1 || k >= m) throw DomainError("coarea_constant: need 1 <= k <= m - 1");
  return std::exp(log_coarea_constant(static_cast<double>(m), static_cast<double>(k)));
}

}  // namespace sphlab
