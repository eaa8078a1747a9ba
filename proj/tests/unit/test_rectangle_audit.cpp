#include <gtest/gtest.h>

#include <cmath>

#include "sphlab/errors.hpp"
#include "sphlab/rectangle_audit.hpp"

using namespace sphlab;

namespace {

CoordinateSet cap_of_measure(std::size_t n, double sigma) { return CoordinateSet::cap(cap_threshold_for_measure(n, sigma)); }

GrassmannianSubset half_window(std::size_t n) {
  return GrassmannianSubset::spectral_window(
      Subspace::coordinate(n, 1).basis(), [](const SingularSpectrum& s) { return s.values[0] * s.values[0] > 0.5; },
      "lambda1^2 > 1/2");
}

bool within(const Estimate& a, const Estimate& b, double k = 3.0) {
  return std::abs(a.value - b.value) <= k * std::hypot(a.std_error, b.std_error);
}

}  // namespace

TEST(MeasureRectangle, WholeSphereGivesOnes) {
  const auto m = measure_rectangle(Rectangle{CoordinateSet::whole(1)}, 20, 10, 100, RngStream(1));
  EXPECT_EQ(m.mu0.value, 1.0);
  EXPECT_EQ(m.mu1.value, 1.0);
  EXPECT_EQ(m.mu2.value, 1.0);
  EXPECT_EQ(m.acceptance(), 1.0);
  const auto c = rectangle_inequality_check(Rectangle{CoordinateSet::whole(1)}, 100, {10, 100}, RngStream(1));
  EXPECT_EQ(c.lhs, 1.0);
  EXPECT_DOUBLE_EQ(c.rhs, 0.8);
  EXPECT_TRUE(c.pass);
}

TEST(MeasureRectangle, GrandMeanEqualsSetMeasure) {
  for (std::size_t n : {64u, 256u})
    for (double sigma : {0.2, 0.02}) {
      const auto m = measure_rectangle(Rectangle{cap_of_measure(n, sigma)}, n, 300, 4000, RngStream(n));
      EXPECT_NEAR(m.mu0.value, sigma, 1e-10);
      EXPECT_NEAR(m.mu1.value, sigma, 3 * m.mu1.std_error) << n << " " << sigma;
      EXPECT_NEAR(m.mu2.value, sigma, 3 * m.mu2.std_error) << n << " " << sigma;
    }
}

TEST(MeasureRectangle, CauchySchwarzStepHolds) {
  const std::size_t n = 100;
  for (const auto& b : {GrassmannianSubset::all(), half_window(n), half_window(n).swapped()}) {
    const auto m = measure_rectangle(Rectangle{cap_of_measure(n, 0.05), b}, n, 100, 2000, RngStream(2));
    EXPECT_LE(m.cs_integral.value, std::sqrt(m.mu1.value * m.mu2.value) * (1 + 1e-12)) << b.label();
  }
}

TEST(MeasureRectangle, SwappingWindowSwapsSides) {
  const std::size_t n = 100;
  const auto a = cap_of_measure(n, 0.05);
  const auto m = measure_rectangle(Rectangle{a, half_window(n)}, n, 400, 4000, RngStream(3));
  const auto s = measure_rectangle(Rectangle{a, half_window(n).swapped()}, n, 400, 4000, RngStream(4));
  EXPECT_TRUE(within(m.mu1, s.mu2));
  EXPECT_TRUE(within(m.mu2, s.mu1));
  EXPECT_GT(m.mu1.value, m.mu2.value);
}

TEST(MeasureRectangle, GlobalRotationInvariance) {
  const std::size_t n = 60;
  RngStream r(5);
  const Matrix rot = sample_orthogonal(n, r);
  const Rectangle q{cap_of_measure(n, 0.1), half_window(n)};
  const auto m = measure_rectangle(q, n, 400, 4000, RngStream(6));
  const auto s = measure_rectangle(q.rotated(rot), n, 400, 4000, RngStream(7));
  EXPECT_TRUE(within(m.mu0, s.mu0));
  EXPECT_TRUE(within(m.mu1, s.mu1));
  EXPECT_TRUE(within(m.mu2, s.mu2));
}

TEST(MeasureRectangle, IdentityFrameChangesNothing) {
  const std::size_t n = 20;
  Rectangle q{cap_of_measure(n, 0.1)};
  q.frame = Matrix::identity(n);
  const auto m = measure_rectangle(q, n, 50, 2000, RngStream(8));
  const auto plain = measure_rectangle(Rectangle{q.a}, n, 50, 2000, RngStream(8));
  EXPECT_EQ(m.mu1.value, plain.mu1.value);
}

TEST(MeasureRectangle, EmptyOrRareWindowAborts) {
  const std::size_t n = 40;
  const auto never = GrassmannianSubset::spectral_window(Subspace::coordinate(n, 1).basis(),
                                                         [](const SingularSpectrum&) { return false; }, "never");
  EXPECT_THROW(measure_rectangle(Rectangle{cap_of_measure(n, 0.1), never}, n, 50, 100, RngStream(9)),
               DegenerateInput);
  const auto rare = GrassmannianSubset::spectral_window(
      Subspace::coordinate(n, 1).basis(), [](const SingularSpectrum& s) { return s.values[0] > 0.99; }, "rare");
  EXPECT_THROW(measure_rectangle(Rectangle{cap_of_measure(n, 0.1), rare}, n, 2000, 100, RngStream(9)),
               DegenerateInput);
}

TEST(MeasureRectangle, OddDimensionThrows) {
  EXPECT_THROW(measure_rectangle(Rectangle{CoordinateSet::cap(0.0)}, 21, 10, 10, RngStream(1)), DomainError);
}

TEST(RectangleInequality, TooManyCoordinatesIsAHypothesisViolation) {
  const Rectangle q{CoordinateSet::box({{0.0, 1.0}, {0.0, 1.0}})};
  EXPECT_THROW(rectangle_inequality_check(q, 200, {}, RngStream(1)), HypothesisViolation);
}

TEST(RectangleInequality, SmallCapWholeAndHalfWindow) {
  const std::size_t n = 200;
  const auto a = cap_of_measure(n, 0.02);
  for (const auto& b : {GrassmannianSubset::all(), half_window(n)}) {
    const auto c = rectangle_inequality_check(Rectangle{a, b}, n, {200, 10000}, RngStream(10));
    EXPECT_TRUE(c.pass) << b.label() << " lhs " << c.lhs << " rhs " << c.rhs;
    EXPECT_GT(c.std_error, 0.0);
  }
}

TEST(RectangleInequality, ThreadCountDoesNotMatter) {
  const std::size_t n = 50;
  const Rectangle q{cap_of_measure(n, 0.1), half_window(n)};
  const auto a = measure_rectangle(q, n, 30, 500, RngStream(11), 1);
  const auto b = measure_rectangle(q, n, 30, 500, RngStream(11), 4);
  EXPECT_EQ(a.mu1.value, b.mu1.value);
  EXPECT_EQ(a.mu2.value, b.mu2.value);
  EXPECT_EQ(a.accepted, b.accepted);
}

TEST(PartitionAudit, SingleRectangleIsAZeroBitContradiction) {
  const std::vector<AuditRectangle> one{{1.0, 1.0, 1.0, Side::in_h}};
  const auto a = partition_audit(one, 1.0 / 9.0, 1000000);
  EXPECT_EQ(a.bits, 0u);
  EXPECT_TRUE(a.contradiction);
  EXPECT_DOUBLE_EQ(a.upper_estimate, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.in_h.error_bound, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.in_h.chain, 1.0);
  EXPECT_DOUBLE_EQ(a.in_h.error_mass, 1.0);
  EXPECT_TRUE(a.bound_feasible);
}

TEST(PartitionAudit, InvalidPartitionThrows) {
  EXPECT_THROW(partition_audit({{0.5, 0.5, 0.5, Side::in_h}}, 1.0 / 9.0, 100), DomainError);
  EXPECT_THROW(partition_audit({}, 1.0 / 9.0, 100), DomainError);
  EXPECT_NO_THROW(partition_audit({{0.995, 0.5, 0.5, Side::in_h}}, 1.0 / 9.0, 100));
}

TEST(PartitionAudit, ChainBoundsGeometricSums) {
  RngStream r(12);
  for (int t = 0; t < 50; ++t) {
    std::vector<AuditRectangle> rects(16);
    double total = 0.0;
    for (auto& q : rects) {
      q.mu0 = r.uniform();
      total += q.mu0;
    }
    for (auto& q : rects) {
      q.mu0 /= total;
      q.mu1 = q.mu0 * 2 * r.uniform();
      q.mu2 = q.mu0 * 2 * r.uniform();
      q.answer = r.uniform() < 0.5 ? Side::in_h : Side::in_hperp;
    }
    const auto a = partition_audit(rects, 1.0 / 9.0, 400);
    EXPECT_LE(a.in_h.sum_geometric, a.in_h.chain + 1e-15);
    EXPECT_LE(a.in_hperp.sum_geometric, a.in_hperp.chain + 1e-15);
    EXPECT_EQ(a.bits, 4u);
  }
}

TEST(PartitionAudit, SyntheticBoundGrowsLinearlyInRootN) {
  const double alpha2 = 0.05;
  std::vector<double> b;
  for (std::size_t n : {100u, 400u, 1600u}) {
    const auto a = partition_audit(synthetic_partition(6), 1.0 / 9.0, n, 1.0, alpha2);
    EXPECT_DOUBLE_EQ(a.in_h.error_bound, 1.0 / 3.0);
    EXPECT_NEAR(a.total_geometric, 1.0, 1e-12);
    b.push_back(a.bound_bits);
  }
  const double slope1 = (b[1] - b[0]) / 10.0, slope2 = (b[2] - b[1]) / 20.0;
  EXPECT_NEAR(slope1, slope2, 1e-12);
  EXPECT_NEAR(slope1, alpha2 / std::log(2.0), 1e-12);
}

TEST(PartitionAudit, LargeErrorTargetGivesNoBound) {
  EXPECT_TRUE(std::isnan(bits_lower_bound(0.16, 100, 1.0, 0.1)));
  EXPECT_FALSE(partition_audit({{1.0, 1.0, 1.0, Side::in_h}}, 0.25, 100).bound_feasible);
}

TEST(PartitionAudit, SyntheticPartitionShape) {
  const auto p = synthetic_partition(3);
  ASSERT_EQ(p.size(), 8u);
  EXPECT_DOUBLE_EQ(p[5].mu0, 0.125);
  EXPECT_EQ(p[0].answer, Side::in_h);
  EXPECT_EQ(p[1].answer, Side::in_hperp);
}
