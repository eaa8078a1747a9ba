#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "sphlab/concentration_lab.hpp"
#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"

using namespace sphlab;

namespace {

// sigma_{m-1}{x_1 >= t} for real m, t >= 0 (incomplete beta oracle).
double cap_oracle(double m, double t) {
  if (t >= 1.0) return 0.0;
  return 0.5 * boost::math::ibeta((m - 1) / 2, 0.5, 1.0 - t * t);
}

RotationWithSpectrum make_lu(std::vector<double> lambda, Matrix u) {
  RotationWithSpectrum lu;
  lu.spectrum = SingularSpectrum(std::move(lambda));
  lu.rotation = std::move(u);
  return lu;
}

RotationWithSpectrum balanced(std::size_t k) {
  return make_lu(std::vector<double>(k, std::numbers::sqrt2 / 2), Matrix::identity(k));
}

BallDensity cap_density(std::size_t n, double sigma) {
  return BallDensity::normalized_indicator(n, CoordinateSet::cap(cap_threshold_for_measure(n, sigma)));
}

BallDensity bump(std::size_t k) {
  return BallDensity::function(
      k, [](std::span<const double> x) { return std::exp(-5.0 * squared_norm(x)); }, 1.0, "bump");
}

}  // namespace

TEST(BallDensityType, IndicatorOfNullSetThrows) {
  EXPECT_THROW(BallDensity::normalized_indicator(10, CoordinateSet::cap(1.0)), DomainError);
}

TEST(BallDensityType, IndicatorIsNormalized) {
  const auto f = cap_density(50, 0.1);
  EXPECT_NEAR(f.set_measure(), 0.1, 1e-10);
  EXPECT_NEAR(f.sup_norm(), 10.0, 1e-8);
  const std::vector<double> inside{0.9};
  EXPECT_NEAR(f(inside), 10.0, 1e-8);
}

TEST(GeometricMeanDirect, WholeSphereIsExactlyOne) {
  RngStream r(1);
  const auto h = sample_grassmannian(20, 10, r);
  const auto s = geometric_mean_direct(20, CoordinateSet::whole(1), h, 200, RngStream(2));
  EXPECT_EQ(s.statistic, 1.0);
  EXPECT_EQ(s.statistic * s.statistic, s.g_h * s.g_hperp);
}

TEST(GeometricMeanDirect, HemisphereIsOneWithinError) {
  RngStream root(3);
  for (std::size_t t = 0; t < 10; ++t) {
    RngStream r = root.split(t);
    const auto h = sample_grassmannian(40, 20, r);
    const auto s = geometric_mean_direct(40, CoordinateSet::cap(0.0), h, 20000, root.split(100 + t));
    EXPECT_NEAR(s.statistic, 1.0, 3 * s.std_error);
    EXPECT_NEAR(s.statistic * s.statistic, s.g_h * s.g_hperp, 1e-12);
  }
}

TEST(ReducedIntegral, ConstantFunctionGivesOne) {
  RngStream r(4);
  for (std::size_t k : {1u, 2u}) {
    const auto lu = sample_lambda_u(200, k, r);
    EXPECT_NEAR(reduced_integral_statistic(BallDensity::constant_one(k), lu, 200).statistic, 1.0, 1e-6) << k;
  }
  QuadratureRule rule;
  rule.qmc_points = 1024;
  const auto lu3 = sample_lambda_u(60, 3, r);
  EXPECT_NEAR(reduced_integral_statistic(BallDensity::constant_one(3), lu3, 60, rule).statistic, 1.0, 1e-12);
}

TEST(ReducedIntegral, BalancedSpectrumMatchesOneDimensionalOracle) {
  const std::size_t n = 100;
  const double t = 0.2;
  const auto f = BallDensity::normalized_indicator(n, CoordinateSet::cap(t));
  const auto s = reduced_integral_statistic(f, balanced(1), n);
  const double expected = cap_oracle(n / 2.0, t * std::numbers::sqrt2) / cap_oracle(n, t);
  EXPECT_NEAR(s.g_h, s.g_hperp, 1e-14);
  EXPECT_NEAR(s.statistic, expected, 1e-6 * expected);
}

TEST(ReducedIntegral, CapStatisticMatchesIncompleteBetaPerDraw) {
  const std::size_t n = 400;
  const double sigma = std::exp(-10.0);
  const double t = cap_threshold_for_measure(n, sigma);
  const auto f = BallDensity::normalized_indicator(n, CoordinateSet::cap(t));
  RngStream root(5);
  for (std::size_t i = 0; i < 20; ++i) {
    RngStream r = root.split(i);
    const auto lu = sample_lambda_u(n, 1, r);
    const double l = lu.spectrum.values[0];
    const double expected =
        std::sqrt(cap_oracle(n / 2.0, t / l) * cap_oracle(n / 2.0, t / std::sqrt(1 - l * l))) / cap_oracle(n, t);
    EXPECT_NEAR(reduced_integral_statistic(f, lu, n).statistic, expected, 1e-8 * expected + 1e-300);
  }
}

TEST(ReducedIntegral, GenericQuadraturePathAgreesWithIntervalPath) {
  const std::size_t n = 100;
  const auto f = cap_density(n, 0.05);
  const double inv = 1.0 / f.set_measure();
  const double t = f.set()->threshold();
  const auto g = BallDensity::function(1, [=](std::span<const double> x) { return x[0] >= t ? inv : 0.0; }, inv);
  RngStream r(6);
  const auto lu = sample_lambda_u(n, 1, r);
  EXPECT_NEAR(reduced_integral_statistic(g, lu, n).statistic, reduced_integral_statistic(f, lu, n).statistic, 2e-3);
}

TEST(ReducedIntegral, DegenerateSpectrumThrows) {
  EXPECT_THROW(reduced_integral_statistic(BallDensity::constant_one(1), make_lu({1.0}, Matrix::identity(1)), 50),
               DegenerateInput);
}

TEST(ReducedIntegral, EqualInDistributionToDirectStatistic) {
  const std::size_t n = 100;
  const auto f = cap_density(n, 0.05);
  const auto& a = *f.set();
  RngStream root(7);
  std::vector<double> direct;
  std::vector<double> reduced;
  // 100 vs 100 draws; the 5% critical value is about 0.19. The statistic piles
  // up just below 1, so the direct arm needs ~1e6 samples per side.
  for (std::size_t i = 0; i < 100; ++i) {
    RngStream rh = root.split(2 * i);
    const auto h = sample_grassmannian(n, n / 2, rh);
    direct.push_back(geometric_mean_direct(n, a, h, 1000000, root.split(2 * i + 1)).statistic);
    RngStream rl = root.split(1000 + i);
    reduced.push_back(reduced_integral_statistic(f, sample_lambda_u(n, 1, rl), n).statistic);
  }
  EXPECT_LT(ks_two_sample(direct, reduced), 0.19);
}

TEST(CauchySchwarz, EqualityForBalancedSpectrum) {
  const std::size_t n = 100;
  const auto f = cap_density(n, 0.05);
  const auto lu = balanced(1);
  EXPECT_NEAR(cauchy_schwarz_bound(f, lu, n).value, reduced_integral_statistic(f, lu, n).statistic, 1e-9);
  RngStream r(8);
  const auto lu2 = make_lu({std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}, sample_orthogonal(2, r));
  EXPECT_NEAR(cauchy_schwarz_bound(bump(2), lu2, 80).value, reduced_integral_statistic(bump(2), lu2, 80).statistic,
              1e-8);
}

TEST(CauchySchwarz, NeverExceedsStatistic) {
  RngStream root(9);
  const std::size_t n = 400;
  const auto small = cap_density(n, std::exp(-10.0));
  const auto moderate = cap_density(100, 0.05);
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream r = root.split(i);
    const auto lu = sample_lambda_u(n, 1, r);
    EXPECT_LE(cauchy_schwarz_bound(small, lu, n).value, reduced_integral_statistic(small, lu, n).statistic + 1e-8);
    const auto lu100 = sample_lambda_u(100, 1, r);
    EXPECT_LE(cauchy_schwarz_bound(moderate, lu100, 100).value,
              reduced_integral_statistic(moderate, lu100, 100).statistic + 1e-8);
  }
  for (std::size_t i = 0; i < 10; ++i) {
    RngStream r = root.split(500 + i);
    const auto lu = sample_lambda_u(120, 2, r);
    EXPECT_LE(cauchy_schwarz_bound(bump(2), lu, 120).value,
              reduced_integral_statistic(bump(2), lu, 120).statistic + 1e-8);
  }
}

TEST(CauchySchwarz, ThreeCoordinatesAgainstConstantFunction) {
  QuadratureRule rule;
  rule.qmc_points = 4096;
  RngStream r(10);
  const auto lu = sample_lambda_u(200, 3, r);
  const auto b = cauchy_schwarz_bound(BallDensity::constant_one(3), lu, 200, rule);
  EXPECT_GT(b.std_error, 0.0);
  EXPECT_LE(b.value, 1.0 + 4 * b.std_error);
  EXPECT_GT(b.value, 0.5);
}

TEST(CauchySchwarz, LogPsiOutsideSupportIsMinusInfinity) {
  const std::vector<double> far{0.9};
  EXPECT_TRUE(std::isinf(log_psi(far, balanced(1), 100)));
  const std::vector<double> origin{0.0};
  EXPECT_EQ(log_psi(origin, balanced(1), 100), 0.0);
}

TEST(TheoremEvent, ConstantFunctionAlwaysSucceeds) {
  const auto res = theorem_event_frequency(400, BallDensity::constant_one(1), 100, RngStream(11));
  EXPECT_EQ(res.event.hits, res.event.trials);
  EXPECT_EQ(res.event.trials, 100u);
}

TEST(TheoremEvent, HypothesesCheckedBeforeSampling) {
  TheoremEventOptions opt;
  opt.alpha2 = 0.01;
  EXPECT_THROW(theorem_event_frequency(400, cap_density(400, std::exp(-10.0)), 10, RngStream(1), opt),
               HypothesisViolation);
  EXPECT_THROW(theorem_event_frequency(100, BallDensity::constant_one(2), 10, RngStream(1)), HypothesisViolation);
  opt.enforce_hypotheses = false;
  const auto res = theorem_event_frequency(400, cap_density(400, std::exp(-10.0)), 10, RngStream(1), opt);
  EXPECT_EQ(res.violations.size(), 1u);
}

TEST(TheoremEvent, SmallCapAtLargeDimension) {
  const std::size_t n = 1600;
  const auto res = theorem_event_frequency(n, cap_density(n, std::exp(-10.0)), 500, RngStream(12));
  EXPECT_GE(res.event.value(), 0.9);
  for (std::size_t i = 0; i < res.statistics.size(); ++i) EXPECT_LE(res.bounds[i], res.statistics[i] + 1e-8);
}

TEST(TheoremEvent, FrequencyNonDecreasingInDimension) {
  TheoremEventOptions opt;
  opt.enforce_hypotheses = false;
  opt.compute_bounds = false;
  double prev = 0.0;
  for (std::size_t n : {100u, 400u, 1600u}) {
    const auto res = theorem_event_frequency(n, cap_density(n, std::exp(-10.0)), 300, RngStream(13), opt);
    EXPECT_GE(res.event.value(), prev) << n;
    prev = res.event.value();
  }
}

TEST(TheoremEvent, CapStatisticMedianAtModerateDimension) {
  // At n = 400 the e^{-10} cap sits far out in the tail: the statistic
  // concentrates well below 0.9 (incomplete-beta oracle median about 0.86).
  const std::size_t n = 400;
  const auto res = theorem_event_frequency(n, cap_density(n, std::exp(-10.0)), 500, RngStream(14));
  EXPECT_NEAR(median(res.statistics), 0.86, 0.02);
}

TEST(TheoremEvent, ExtremalCapFamily) {
  const std::size_t n = 400;
  const auto res = theorem_event_frequency(n, cap_density(n, std::pow(400.0, -1.0 / 3.0)), 500, RngStream(15));
  EXPECT_GE(res.event.value(), 0.95);
}

TEST(SmallBall, OriginGivesOne) {
  RngStream r(16);
  const auto lu = sample_lambda_u(4096, 2, r);
  const auto s = small_ball_ratio(lu, 4096, 0.5, {{0.0, 0.0}});
  EXPECT_EQ(s.ratio, 1.0);
  EXPECT_TRUE(s.applicable);
}

TEST(SmallBall, BalancedClosedForm) {
  for (std::size_t n : {10000u, 40000u}) {
    const double x = 0.5 / std::pow(double(n), 0.25);
    const double m = n / 2.0;
    const double closed = std::pow(1 - 2 * x * x, (m - 3) / 2) / std::pow(1 - x * x, (n - 3.0) / 2);
    const auto s = small_ball_ratio(balanced(1), n, 0.5, {{x}});
    EXPECT_NEAR(s.ratio, closed, 1e-10 * closed);
    EXPECT_GE(s.ratio, 0.95);
    EXPECT_LE(s.ratio, 1.05);
  }
}

TEST(SmallBall, ExpansionWindowGuard) {
  EXPECT_THROW(small_ball_ratio(balanced(1), 100, 0.5, {{0.0}}), HypothesisViolation);
}

TEST(SmallBall, SpectrumOutsideWindowIsNotApplicable) {
  const auto s = small_ball_ratio(make_lu({0.3, 0.7}, Matrix::identity(2)), 4096, 0.5, {{0.0, 0.0}});
  EXPECT_FALSE(s.applicable);
}

TEST(SmallBall, HighFrequencyAtLargeDimension) {
  const auto f = small_ball_event_frequency(4096, 2, 0.5, 1000, RngStream(1));
  EXPECT_EQ(f.not_applicable, 0u);
  EXPECT_GE(f.event.value(), 0.99);
}

TEST(SmallBall, EigenDirectionsAttainSphereMinimum) {
  // log psi is concave in the squared coordinates y_i^2 of y = U^T x, so on a
  // sphere the minimum sits at some +-r U e_i.
  RngStream root(18);
  for (std::size_t i = 0; i < 50; ++i) {
    RngStream r = root.split(i);
    const auto lu = sample_lambda_u(4096, 3, r);
    const double radius = 0.5 / 8.0;
    std::vector<std::vector<double>> axes;
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> e(3, 0.0);
      e[j] = radius;
      axes.push_back(multiply(lu.rotation, e));
    }
    const double floor = small_ball_ratio(lu, 4096, 0.5, axes).ratio;
    EXPECT_GE(small_ball_ratio(lu, 4096, 0.5, small_ball_probes(lu, radius, r, 256)).ratio, floor * (1 - 1e-12));
  }
}

TEST(LaplaceTail, MassMatchesFrozenIncompleteBeta) {
  struct Case {
    std::size_t n, k;
    double expected;
  };
  for (const Case& c : {Case{1600, 1, 0.00154683215956882}, Case{6400, 3, 0.000167850340907366},
                        Case{400, 1, 0.0251626845599434}, Case{100, 2, 0.289218566503505}}) {
    const auto rep = evaluate_tail(c.n, c.k, 0.5, 0.1, 0.01);
    EXPECT_NEAR(rep.tail_mass, c.expected, 1e-10 * c.expected) << c.n << "," << c.k;
    const double r0 = 0.5 / std::pow(double(c.n), 0.25);
    EXPECT_NEAR(rep.tail_mass, boost::math::ibetac(c.k / 2.0, (c.n - c.k) / 2.0, r0 * r0), 1e-10 * c.expected);
  }
}

TEST(LaplaceTail, BoundHoldsOnAdmissibleGrid) {
  const double rho = 0.5;
  const double a1 = rho * rho / 6;
  const double a2 = AnalyticConstants::default_alpha2(a1, rho);
  int admissible = 0;
  for (std::size_t n : {400u, 1600u, 6400u})
    for (std::size_t k : {std::size_t{1}, static_cast<std::size_t>(a1 * std::sqrt(double(n)))}) {
      if (k == 0) continue;
      const auto rep = evaluate_tail(n, k, rho, a1, a2);
      if (!rep.violations.empty()) continue;
      ++admissible;
      EXPECT_TRUE(rep.holds()) << n << "," << k;
      EXPECT_NO_THROW(laplace_tail_bound(n, k, rho, a1, a2));
    }
  EXPECT_GE(admissible, 3);
}

TEST(LaplaceTail, DefaultsViolatePreconditions) {
  EXPECT_THROW(laplace_tail_bound(1600, 1, 0.5, 0.1, 0.005), HypothesisViolation);
}

TEST(LaplaceTail, LargeRadiusLeavesNothing) {
  const auto rep = evaluate_tail(16, 1, 5.0, 0.1, 0.01);
  EXPECT_EQ(rep.brute_value, 0.0);
}

TEST(LaplaceTail, WholeRangeIsNormalized) {
  // rho -> 0 integrates the full radial density.
  const auto rep = evaluate_tail(200, 3, 1e-12, 0.1, 0.0 + 1e-300);
  EXPECT_NEAR(rep.tail_mass, 1.0, 1e-10);
}

TEST(LaplaceTail, BallVolumeIdentity) {
  const auto id = coarea_ball_identity(40, 4);
  EXPECT_NEAR(id.lhs, 171.0, 1e-8 * 171.0);
  EXPECT_NEAR(id.rhs, 171.0, 1e-8 * 171.0);
  for (std::size_t n : {10u, 41u, 400u}) {
    const auto c = coarea_ball_identity(n, 3);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-8 * c.rhs);
  }
}
