#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <memory>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/vsp_protocol.hpp"

using namespace sphlab;

namespace {

ProtocolConfig small_config() {
  ProtocolConfig c;
  c.n = 16;
  c.dim_e = 8;
  c.net_size = 200;
  c.list_size = 4;
  c.quant_bits = 12;
  return c;
}

SharedList single_entry(Subspace e, QuantizedNet net) {
  return {std::make_shared<const SharedEntry>(SharedEntry{std::move(e), std::move(net)})};
}

}  // namespace

TEST(ProtocolConfigType, DefaultsAndBitCount) {
  const auto c = ProtocolConfig::defaults(128);
  EXPECT_EQ(c.dim_e, 33u);
  EXPECT_EQ(c.quant_bits, 7u);
  EXPECT_EQ(c.bits_sent(), 6u + 15u);
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(64), 6u);
  EXPECT_EQ(ceil_log2(65), 7u);
  ProtocolConfig bad = c;
  bad.dim_e = 129;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = c;
  bad.net_size = 0;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(MakeInstance, LiesInTheLabelledHalf) {
  RngStream r(1);
  for (int i = 0; i < 10; ++i) {
    const auto a = make_instance(40, true, r);
    EXPECT_LT(complement(a.h).projection_norm2(a.u.coords()), 1e-20);
    EXPECT_EQ(a.label, Side::in_h);
    const auto b = make_instance(40, false, r);
    EXPECT_LT(b.h.projection_norm2(b.u.coords()), 1e-20);
    EXPECT_EQ(b.label, Side::in_hperp);
  }
}

TEST(MakeInstance, OddDimensionThrows) {
  RngStream r(1);
  EXPECT_THROW(make_instance(41, true, r), DomainError);
}

TEST(MakeInstance, UniformOnSubsphere) {
  // First H-frame coordinate y of u: y^2 ~ Beta(1/2, (d-1)/2) with sign symmetric.
  const std::size_t n = 10, d = n / 2;
  RngStream root(2);
  std::vector<std::size_t> counts(20, 0);
  for (std::size_t i = 0; i < 10000; ++i) {
    RngStream r = root.split(i);
    const auto inst = make_instance(n, true, r);
    const double y = inst.h.coordinates_of(inst.u.coords())[0];
    const double half = 0.5 * boost::math::ibeta(0.5, (d - 1) / 2.0, y * y);
    const double cdf = y >= 0 ? 0.5 + half : 0.5 - half;
    ++counts[std::min<std::size_t>(19, static_cast<std::size_t>(cdf * 20))];
  }
  EXPECT_GT(chi_square_uniform_pvalue(counts), 1e-3);
}

TEST(Quantize, GridExamples) {
  for (unsigned b : {1u, 4u, 7u, 15u}) {
    EXPECT_EQ(quantize(0.0, b).value, 0.0);
    EXPECT_EQ(quantize(1.0, b).value, 1.0);
    EXPECT_EQ(quantize(-1.0, b).value, -1.0);
  }
  // Halves go to the even code.
  EXPECT_EQ(quantize(0.25, 2).value, 0.0);
  EXPECT_EQ(quantize(0.75, 2).value, 1.0);
  EXPECT_EQ(quantize(-0.25, 2).value, 0.0);
}

TEST(Quantize, ErrorWithinHalfStep) {
  RngStream r(3);
  for (unsigned b = 1; b <= 15; ++b)
    for (int i = 0; i < 1000; ++i) {
      const double x = 2 * r.uniform() - 1;
      const auto q = quantize(x, b);
      EXPECT_LE(std::abs(q.value - x), std::ldexp(1.0, -static_cast<int>(b)));
      EXPECT_FALSE(q.clamped);
    }
}

TEST(Quantize, ClampsAndFlags) {
  const auto q = quantize(1.5, 3);
  EXPECT_EQ(q.value, 1.0);
  EXPECT_TRUE(q.clamped);
  EXPECT_THROW(quantize(0.5, 0), DomainError);
  EXPECT_THROW(quantize(0.5, 16), DomainError);
}

TEST(PresampleShared, NetPointsNearUnitAndInsideE) {
  const auto cfg = small_config();
  const auto list = presample_shared(cfg, RngStream(4));
  ASSERT_EQ(list.size(), cfg.list_size);
  const double tol = std::ldexp(1.0, -static_cast<int>(cfg.quant_bits)) * std::sqrt(double(cfg.n));
  for (const auto& entry : list) {
    ASSERT_EQ(entry->net.size(), cfg.net_size);
    EXPECT_EQ(entry->e.dim(), cfg.dim_e);
    for (std::size_t j = 0; j < entry->net.size(); ++j) {
      const auto p = entry->net.point(j);
      const double len = norm(p);
      EXPECT_NEAR(len, 1.0, tol);
      EXPECT_LE(std::sqrt(std::max(0.0, len * len - entry->e.projection_norm2(p))), tol);
    }
  }
}

TEST(PresampleShared, ThreadCountDoesNotMatter) {
  const auto cfg = small_config();
  const auto a = presample_shared(cfg, RngStream(5), 1);
  const auto b = presample_shared(cfg, RngStream(5), 3);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cfg.net_size; j += 17) EXPECT_EQ(a[i]->net.point(j), b[i]->net.point(j));
}

TEST(HalfNet, UniformNetCoversLowDimensionalSphere) {
  RngStream root(6);
  int good = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    RngStream r = root.split(t);
    const auto net = uniform_net(4, 5000, r);
    good += half_net_check(net, 100000, r).is_half_net ? 1 : 0;
  }
  EXPECT_GE(good, 99);
}

TEST(HalfNet, SparseNetFailsAndStopsEarly) {
  RngStream r(7);
  const auto net = uniform_net(4, 3, r);
  const auto c = half_net_check(net, 100000, r);
  EXPECT_FALSE(c.is_half_net);
  EXPECT_LT(c.probes_checked, 100000u);
  EXPECT_LT(c.worst_probe, 7.0 / 8.0);
}

TEST(AliceStep, PicksNetPointEqualToU) {
  const std::size_t n = 8;
  std::vector<double> e1(n, 0.0);
  e1[0] = 1.0;
  RngStream r(8);
  QuantizedNet net(n, 10);
  for (int j = 0; j < 50; ++j) net.push_back(sample_unit_sphere(n, r).coords());
  net.push_back(e1);
  for (int j = 0; j < 50; ++j) net.push_back(sample_unit_sphere(n, r).coords());
  const auto list = single_entry(Subspace::coordinate(n, n), std::move(net));
  const auto msg = alice_step(UnitVector(e1), list, r);
  EXPECT_EQ(msg.i_hat, 0u);
  EXPECT_EQ(msg.j_hat, 50u);
}

TEST(AliceStep, AntipodalPairAndTies) {
  QuantizedNet net(2, 8);
  net.push_back(std::vector<double>{-0.6, -0.8});
  net.push_back(std::vector<double>{0.6, 0.8});
  net.push_back(std::vector<double>{0.6, 0.8});
  EXPECT_EQ(net.argmax(std::vector<double>{0.6, 0.8}), 1u);
  EXPECT_EQ(net.argmax(std::vector<double>{-0.6, -0.8}), 0u);
}

TEST(AliceStep, NetMaximumWithinHalfAndFullProjection) {
  // dim_e = 3 with 3000 points: checked to be a 1/2-net of S cap E first.
  ProtocolConfig cfg;
  cfg.n = 8;
  cfg.dim_e = 3;
  cfg.net_size = 3000;
  cfg.list_size = 1;
  cfg.quant_bits = 15;
  RngStream root(9);
  const double qerr = std::ldexp(1.0, -15) * std::sqrt(8.0);
  for (std::size_t t = 0; t < 20; ++t) {
    RngStream r = root.split(t);
    const auto entry = sample_shared_entry(cfg, r);
    std::vector<std::vector<double>> coeffs;
    for (std::size_t j = 0; j < entry.net.size(); ++j) coeffs.push_back(entry.e.coordinates_of(entry.net.point(j)));
    for (auto& c : coeffs) {
      const double l = norm(c);
      for (double& x : c) x /= l;
    }
    ASSERT_TRUE(half_net_check(coeffs, 20000, r).is_half_net);
    for (int i = 0; i < 20; ++i) {
      const auto u = sample_unit_sphere(8, r);
      const auto c = net_max_check(entry, u);
      EXPECT_GE(c.net_max, 0.5 * c.projection - qerr);
      EXPECT_LE(c.net_max, c.projection + qerr);
    }
  }
}

TEST(BobStep, ExactMembership) {
  RngStream r(10);
  const auto h = sample_grassmannian(12, 6, r);
  const auto hp = complement(h);
  const std::vector<double> y{0.1, -0.3, 0.5, 0.2, 0.7, -0.1};
  EXPECT_EQ(bob_step(h, h.embed(y)), Side::in_h);
  EXPECT_EQ(bob_step(h, hp.embed(y)), Side::in_hperp);
}

TEST(BobStep, SeparatedProjection) {
  // |Proj_H theta|^2 = 1/2 + 1000/sqrt(n) with n = 1.6e7.
  const double a = 0.5 + 1000.0 / std::sqrt(1.6e7);
  const auto h = Subspace::coordinate(2, 1);
  EXPECT_EQ(bob_step(h, std::vector<double>{std::sqrt(a), std::sqrt(1 - a)}), Side::in_h);
  EXPECT_EQ(bob_step(h, std::vector<double>{std::sqrt(1 - a), std::sqrt(a)}), Side::in_hperp);
  EXPECT_EQ(bob_step(h, std::vector<double>{0.5, 0.5}), Side::in_hperp);
}

TEST(Transcript, CsvRoundTrip) {
  const Transcript t{17, 3, 12345, 21, Side::in_hperp, Side::in_h};
  const auto line = to_csv_line(t);
  EXPECT_EQ(line, "17,3,12345,21,in-H-perp,in-H,0");
  const auto back = parse_transcript_line(line + "\n");
  EXPECT_EQ(back.instance_id, 17u);
  EXPECT_EQ(back.j_hat, 12345u);
  EXPECT_EQ(back.label, Side::in_hperp);
  EXPECT_EQ(back.answer, Side::in_h);
  EXPECT_EQ(to_csv_line(back), line);
}

TEST(Transcript, MalformedLinesReportPosition) {
  try {
    parse_transcript_line("1,2,x3,4,in-H,in-H,1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  try {
    parse_transcript_line("1,2,3,4,in-G,in-H,1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 8u);
  }
  EXPECT_THROW(parse_transcript_line("1,2,3,4,in-H,in-H"), ParseError);
  EXPECT_THROW(parse_transcript_line("1,2,3,4,in-H,in-H,0"), ParseError);
}

TEST(RunProtocol, PreseededNetSucceeds) {
  const std::size_t n = 16;
  RngStream r(11);
  auto inst = make_instance(n, true, r);
  QuantizedNet net(n, 12);
  for (int j = 0; j < 100; ++j) net.push_back(inst.h.embed(sample_unit_sphere(n / 2, r).coords()));
  net.push_back(inst.u.coords());
  ProtocolConfig cfg = small_config();
  cfg.list_size = 1;
  cfg.net_size = 101;
  const auto list = single_entry(inst.h, std::move(net));
  const std::vector<Instance> one{inst};
  const auto res = run_protocol(cfg, one, list, RngStream(12));
  EXPECT_EQ(res.success_rate, 1.0);
  EXPECT_EQ(res.transcripts[0].j_hat, 100u);
  EXPECT_EQ(res.bits_sent, 0u + 7u);
}

TEST(RunProtocol, DimensionMismatchThrows) {
  RngStream r(13);
  const std::vector<Instance> inst{make_instance(10, true, r)};
  EXPECT_THROW(run_shared_randomness(small_config(), inst, RngStream(1)), DomainError);
}

TEST(RunProtocol, SharedVariantReadsOneEntryOfAFreshList) {
  const auto cfg = small_config();
  const auto inst = make_instances(cfg.n, 6, RngStream(14));
  const RngStream rng(15);
  const auto res = run_shared_randomness(cfg, inst, rng);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const RngStream base = rng.split(i);
    const auto list = presample_shared(cfg, base.split(1));
    const std::size_t i_hat = res.transcripts[i].i_hat;
    EXPECT_EQ(res.transcripts[i].j_hat, list[i_hat]->net.argmax(inst[i].u.coords()));
    const auto theta = list[i_hat]->net.point(res.transcripts[i].j_hat);
    EXPECT_EQ(res.transcripts[i].answer, bob_step(inst[i].h, theta));
  }
}

TEST(RunProtocol, SuccessRateAndSymmetryAtSmallScale) {
  const auto cfg = ProtocolConfig::defaults(64, 3.0, 2000, 16);
  const auto inst = make_instances(64, 200, RngStream(16));
  const auto list = presample_shared(cfg, RngStream(17));
  const auto der = run_protocol(cfg, inst, list, RngStream(18));
  const auto sh = run_shared_randomness(cfg, inst, RngStream(19));
  EXPECT_GE(sh.success_rate, 0.6);
  EXPECT_EQ(sh.in_h.trials + sh.in_hperp.trials, 200u);
  const auto a = sh.in_h.estimate(), b = sh.in_hperp.estimate();
  EXPECT_LE(std::abs(a.value - b.value), 3 * std::hypot(a.std_error, b.std_error));
  EXPECT_LE(std::abs(der.success_rate - sh.success_rate), 3 * std::hypot(der.std_error, sh.std_error));
  for (const auto& t : sh.transcripts) EXPECT_EQ(t.bits_sent, cfg.bits_sent());
}

TEST(RunProtocol, ThreadCountDoesNotMatter) {
  const auto cfg = small_config();
  const auto inst = make_instances(cfg.n, 20, RngStream(20));
  const auto a = run_shared_randomness(cfg, inst, RngStream(21), 1);
  const auto b = run_shared_randomness(cfg, inst, RngStream(21), 4);
  for (std::size_t i = 0; i < inst.size(); ++i) EXPECT_EQ(to_csv_line(a.transcripts[i]), to_csv_line(b.transcripts[i]));
}

TEST(RunProtocol, SuccessGrowsWithNetSize) {
  const std::size_t n = 128;
  const auto inst = make_instances(n, 300, RngStream(22));
  double prev = 0.0;
  for (std::size_t m : {100u, 1000u, 20000u}) {
    const auto cfg = ProtocolConfig::defaults(n, 3.0, m, 64);
    const double rate = run_shared_randomness(cfg, inst, RngStream(23)).success_rate;
    EXPECT_GT(rate, prev) << m;
    prev = rate;
  }
}

TEST(ProjectionTail, Extremes) {
  EXPECT_EQ(projection_tail(50, 25, 0.0, 1000, RngStream(24)).value(), 1.0);
  EXPECT_EQ(projection_tail(50, 25, 1.0, 1000, RngStream(24)).value(), 0.0);
  EXPECT_EQ(projection_tail(50, 25, 0.6, 1000, RngStream(24)).value(), 0.0);
  EXPECT_THROW(projection_tail(10, 11, 0.1, 10, RngStream(24)), DomainError);
}

TEST(ProjectionTail, MatchesBetaOracle) {
  // |Proj_F v|^2 ~ Beta(l/2, (d-l)/2).
  const auto f = projection_tail(100, 50, 0.1, 200000, RngStream(25));
  const double p = boost::math::ibeta(25.0, 25.0, 0.4) + boost::math::ibetac(25.0, 25.0, 0.6);
  EXPECT_NEAR(f.value(), p, 4 * f.estimate().std_error);
}

TEST(ProjectionTail, SubGaussianRate) {
  const double small = std::log(projection_tail(100, 50, 0.1, 200000, RngStream(26)).value());
  const double large = std::log(projection_tail(400, 200, 0.1, 200000, RngStream(27)).value());
  EXPECT_GE(large / small, 2.0);
  EXPECT_LE(large / small, 8.0);
}
