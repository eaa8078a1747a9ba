#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/parallel.hpp"
#include "sphlab/rectangle_audit.hpp"

namespace sphlab {

GrassmannianSubset GrassmannianSubset::all() { return GrassmannianSubset(); }

GrassmannianSubset GrassmannianSubset::spectral_window(Matrix reference, SpectrumPredicate predicate,
                                                       std::string label) {
  if (!predicate) throw DomainError("spectral_window: empty predicate");
  GrassmannianSubset b;
  b.reference_ = Subspace(std::move(reference)).basis();  // validates orthonormality
  b.predicate_ = std::move(predicate);
  b.label_ = std::move(label);
  return b;
}

bool GrassmannianSubset::contains(const Subspace& h) const {
  if (!predicate_) return true;
  if (h.ambient_dim() != reference_.rows()) throw DomainError("GrassmannianSubset: ambient dimension mismatch");
  const Subspace ref(reference_);
  return predicate_(principal_cosines(swapped_ ? complement(h) : h, ref));
}

GrassmannianSubset GrassmannianSubset::swapped() const {
  GrassmannianSubset b = *this;
  if (predicate_) {
    b.swapped_ = !swapped_;
    b.label_ = "swap(" + label_ + ")";
  }
  return b;
}

GrassmannianSubset GrassmannianSubset::rotated(const Matrix& r) const {
  GrassmannianSubset b = *this;
  if (predicate_) b.reference_ = Subspace(reference_).rotated(r).basis();
  return b;
}

Rectangle Rectangle::rotated(const Matrix& r) const {
  Rectangle q = *this;
  q.frame = frame ? r * *frame : r;
  q.b = b.rotated(r);
  return q;
}

namespace {

struct TrialValues {
  double s1 = 0.0;
  double s2 = 0.0;
};

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t t = a.size();
  if (t < 2) return 0.0;
  const double ma = mean(a), mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < t; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(t - 1);
}

}  // namespace

MeasureTriple measure_rectangle(const Rectangle& q, std::size_t n, std::size_t subspace_trials,
                                std::size_t point_samples, const RngStream& rng, unsigned threads) {
  if (n < 2 || n % 2 != 0) throw DomainError("measure_rectangle: n must be even");
  if (subspace_trials == 0 || point_samples == 0) throw DomainError("measure_rectangle: need trials and samples");
  if (q.frame && (q.frame->rows() != n || q.frame->cols() != n))
    throw DomainError("measure_rectangle: frame must be n x n");

  auto draw = [&](std::size_t i) {
    RngStream r = rng.split(i).split(0);
    return sample_grassmannian(n, n / 2, r);
  };

  // Membership first, so a nearly empty B costs no point samples.
  const auto member = parallel_map(subspace_trials, threads, [&](std::size_t i) { return q.b.contains(draw(i)) ? 1 : 0; });
  std::size_t accepted = 0;
  for (int m : member) accepted += static_cast<std::size_t>(m);
  const double acceptance = static_cast<double>(accepted) / static_cast<double>(subspace_trials);
  if (accepted == 0 || acceptance < 1e-3) {
    std::ostringstream os;
    os << "measure_rectangle: B '" << q.b.label() << "' accepted " << accepted << " of " << subspace_trials
       << " subspace draws (below 1e-3); refusing to sample points";
    throw DegenerateInput(os.str());
  }

  const Matrix frame_t = q.frame ? q.frame->transpose() : Matrix();
  const auto values = parallel_map(subspace_trials, threads, [&](std::size_t i) {
    TrialValues v;
    if (!member[i]) return v;
    Subspace h = draw(i);
    // sigma_H(R A cap H) = sigma_{R^T H}(A cap R^T H).
    if (q.frame) h = h.rotated(frame_t);
    RngStream r1 = rng.split(i).split(1);
    RngStream r2 = rng.split(i).split(2);
    v.s1 = restricted_measure_mc(q.a, h, point_samples, r1).value;
    v.s2 = restricted_measure_mc(q.a, complement(h), point_samples, r2).value;
    return v;
  });

  std::vector<double> v1(subspace_trials), v2(subspace_trials), g(subspace_trials);
  for (std::size_t i = 0; i < subspace_trials; ++i) {
    v1[i] = values[i].s1;
    v2[i] = values[i].s2;
    g[i] = std::sqrt(values[i].s1 * values[i].s2);
  }

  MeasureTriple out;
  out.subspace_trials = subspace_trials;
  out.accepted = accepted;
  const double sigma_a = coordinate_set_measure(n, q.a).value;
  const Estimate pb = binomial_estimate(accepted, subspace_trials);
  out.mu0 = {sigma_a * pb.value, sigma_a * pb.std_error};
  out.mu1 = mean_estimate(v1);
  out.mu2 = mean_estimate(v2);
  out.cs_integral = mean_estimate(g);

  const double m1 = out.mu1.value, m2 = out.mu2.value;
  if (m1 > 0.0 && m2 > 0.0) {
    const double a = 0.5 * std::sqrt(m2 / m1), b = 0.5 * std::sqrt(m1 / m2);
    const double var = a * a * sample_variance(v1) + b * b * sample_variance(v2) + 2 * a * b * covariance(v1, v2);
    out.geometric_mean_error = std::sqrt(std::max(0.0, var) / static_cast<double>(subspace_trials));
  }
  return out;
}

RectangleCheck rectangle_inequality_check(const Rectangle& q, std::size_t n, const RectangleParams& params,
                                          const RngStream& rng) {
  const double limit = params.alpha1 * std::sqrt(static_cast<double>(n));
  if (static_cast<double>(q.a.k()) > limit) {
    std::ostringstream os;
    os << "k <= alpha1*sqrt(n) fails: A depends on " << q.a.k() << " coordinates, alpha1*sqrt(n)=" << limit;
    throw HypothesisViolation(os.str());
  }
  RectangleCheck c;
  c.measures = measure_rectangle(q, n, params.subspace_trials, params.point_samples, rng, params.threads);
  c.lhs = std::sqrt(c.measures.mu1.value * c.measures.mu2.value);
  c.rhs = 0.8 * c.measures.mu0.value;
  c.std_error = c.measures.geometric_mean_error;
  c.pass = c.lhs + 3 * c.std_error >= c.rhs;
  return c;
}

// Partition audit

double bits_lower_bound(double error_target, std::size_t n, double c, double alpha2) {
  const double gap = 0.8 - 2 * std::sqrt(error_target);
  if (!(gap > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(gap / c) + alpha2 * std::sqrt(static_cast<double>(n)) * std::numbers::log2e;
}

PartitionAudit partition_audit(const std::vector<AuditRectangle>& rectangles, double error_target, std::size_t n,
                               double c, double alpha2) {
  if (rectangles.empty()) throw DomainError("partition_audit: no rectangles");
  if (!(error_target >= 0.0 && error_target <= 1.0)) throw DomainError("partition_audit: error_target must lie in [0, 1]");
  if (!(c > 0.0)) throw DomainError("partition_audit: C must be positive");
  double total0 = 0.0;
  for (const auto& r : rectangles) {
    for (double m : {r.mu0, r.mu1, r.mu2})
      if (!(m >= 0.0 && m <= 1.0)) throw DomainError("partition_audit: rectangle measures must lie in [0, 1]");
    total0 += r.mu0;
  }
  if (std::abs(total0 - 1.0) > 0.01) {
    std::ostringstream os;
    os << "partition_audit: mu0 sums to " << total0 << ", not a partition";
    throw DomainError(os.str());
  }

  PartitionAudit out;
  double s1[2] = {0, 0}, s2[2] = {0, 0};
  for (const auto& r : rectangles) {
    const int cls = r.answer == Side::in_h ? 0 : 1;
    ClassChain& chain = cls == 0 ? out.in_h : out.in_hperp;
    const double g = std::sqrt(r.mu1 * r.mu2);
    chain.sum_geometric += g;
    out.total_geometric += g;
    s1[cls] += r.mu1;
    s2[cls] += r.mu2;
  }
  for (int cls = 0; cls < 2; ++cls) {
    ClassChain& chain = cls == 0 ? out.in_h : out.in_hperp;
    chain.chain = std::sqrt(s1[cls] * s2[cls]);
    chain.error_bound = std::sqrt(1.0 * error_target);
    chain.error_mass = cls == 0 ? s2[cls] : s1[cls];
  }
  out.bits = ceil_log2(rectangles.size());
  out.lower_estimate =
      0.8 - std::ldexp(c, static_cast<int>(out.bits)) * std::exp(-alpha2 * std::sqrt(static_cast<double>(n)));
  out.upper_estimate = 2 * std::sqrt(error_target);
  out.contradiction = out.lower_estimate > out.upper_estimate;
  out.bound_bits = bits_lower_bound(error_target, n, c, alpha2);
  out.bound_feasible = !std::isnan(out.bound_bits);
  return out;
}

std::vector<AuditRectangle> synthetic_partition(std::size_t d) {
  if (d > 30) throw DomainError("synthetic_partition: d too large");
  const std::size_t count = std::size_t{1} << d;
  const double m = 1.0 / static_cast<double>(count);
  std::vector<AuditRectangle> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {m, m, m, i % 2 == 0 ? Side::in_h : Side::in_hperp};
  return out;
}

}  // namespace sphlab
