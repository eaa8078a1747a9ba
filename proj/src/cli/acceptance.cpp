#include "sphlab/acceptance.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sphlab/concentration_lab.hpp"
#include "sphlab/errors.hpp"
#include "sphlab/numcore/parallel.hpp"
#include "sphlab/random_spectra.hpp"
#include "sphlab/rectangle_audit.hpp"
#include "sphlab/sphere_geometry.hpp"
#include "sphlab/vsp_protocol.hpp"

namespace sphlab {

void Digest::add(std::uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    h_ ^= (x >> (8 * i)) & 0xffU;
    h_ *= 0x100000001b3ULL;
  }
}

void Digest::add(double x) { add(std::bit_cast<std::uint64_t>(x)); }

void Digest::add(const std::vector<double>& xs) {
  add(static_cast<std::uint64_t>(xs.size()));
  for (double x : xs) add(x);
}

namespace {

constexpr const char* kTitles[kCriterionCount] = {
    "coarea identity, n=64 k=2 box: quadrature vs sphere MC",
    "principal cosines vs Wishart ratio spectrum (KS)",
    "complement spectrum identity",
    "Gordon singular value bound",
    "lambda concentration rate n^{-1/4}",
    "cancellation rate n^{-1/2}",
    "coefficient ratio asymptotic",
    "coefficient event frequency",
    "reduced integral equal in distribution to direct MC",
    "geometric-mean event at sigma(A)=e^{-10}, n=400",
    "Cauchy-Schwarz bound below statistic",
    "extremal cap family sigma(A)=n^{-1/3}",
    "Laplace tail bound and ball-volume identity",
    "small-ball ratio",
    "vector-in-subspace protocol",
    "random 1/2-net coverage",
    "projection concentration rate",
    "rectangle inequality",
    "partition audit",
    "determinism across thread counts",
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct Builder {
  CriterionResult r;
  Digest digest;

  void metric(std::string name, double value, double se = 0.0) {
    digest.add(value);
    digest.add(se);
    r.metrics.push_back({std::move(name), value, se});
  }
  void trace(const std::vector<double>& xs) { digest.add(xs); }
};

RngStream criterion_stream(const SuiteOptions& o, int id) { return RngStream(o.seed).split(static_cast<std::uint64_t>(id)); }

// 1
void coarea(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 64, samples = 1000000, block = 1 << 14;
  const auto a = CoordinateSet::box({{0.0, 0.2}, {-0.1, 0.3}});
  const auto quad = coordinate_set_measure(n, a);
  const RngStream rng = criterion_stream(o, 1);
  const std::size_t blocks = (samples + block - 1) / block;
  const auto hits = parallel_map(blocks, o.threads, [&](std::size_t j) {
    RngStream r = rng.split(j);
    std::size_t h = 0;
    for (std::size_t i = j * block; i < std::min(samples, (j + 1) * block); ++i)
      h += a.contains(sample_unit_sphere(n, r).coords()) ? 1 : 0;
    return h;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  const Estimate mc = binomial_estimate(total, samples);
  b.metric("quadrature", quad.value);
  b.metric("sphere_mc", mc.value, mc.std_error);
  const double gap = std::abs(quad.value - mc.value);
  b.r.pass = gap <= 3 * mc.std_error;
  b.r.detail = fmt("|quad %.6f - MC %.6f| = %.2e, 3 stderr = %.2e", quad.value, mc.value, gap, 3 * mc.std_error);
}

// 2
void wishart(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 200, k = 4, draws = 2000;
  const RngStream rng = criterion_stream(o, 2);
  const Subspace e = Subspace::coordinate(n, k);
  const auto cos = parallel_map(draws, o.threads, [&](std::size_t i) {
    RngStream r = rng.split(0).split(i);
    return principal_cosines(sample_grassmannian(n, n / 2, r), e).values;
  });
  const auto wis = parallel_map(draws, o.threads, [&](std::size_t i) {
    RngStream r = rng.split(1).split(i);
    return wishart_ratio_spectrum(n, k, r).values;
  });
  std::vector<double> a, w;
  for (const auto& v : cos) a.insert(a.end(), v.begin(), v.end());
  for (const auto& v : wis) w.insert(w.end(), v.begin(), v.end());
  b.trace(a);
  b.trace(w);
  const double ks = ks_two_sample(a, w);
  b.metric("ks", ks);
  b.r.pass = ks < 0.06;
  b.r.detail = fmt("KS = %.4f (need < 0.06), %zu pooled values per side", ks, a.size());
}

// 3
void complement_identity(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 100, k = 5, draws = 100;
  const RngStream rng = criterion_stream(o, 3);
  const Subspace e = Subspace::coordinate(n, k);
  const auto defects = parallel_map(draws, o.threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const Subspace h = sample_grassmannian(n, n / 2, r);
    const auto a = principal_cosines(h, e).values;
    const auto c = principal_cosines(complement(h), e).values;
    double worst = 0.0;
    // Ascending order: the largest cosine of H pairs with the smallest of H^perp.
    for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(a[j] * a[j] + c[k - 1 - j] * c[k - 1 - j] - 1.0));
    return worst;
  });
  b.trace(defects);
  double worst = 0.0;
  for (double d : defects) worst = std::max(worst, d);
  b.metric("max_defect", worst);
  b.r.pass = worst <= 1e-8;
  b.r.detail = fmt("max |lambda(H)^2 + lambda(H^perp)^2 - 1| = %.2e over %zu draws", worst, draws);
}

// 4
void gordon(Builder& b, const SuiteOptions& o) {
  const RngStream rng = criterion_stream(o, 4);
  bool pass = true;
  std::ostringstream detail;
  const double ts[] = {2.0, 2.5, 3.0};
  for (std::size_t j = 0; j < 3; ++j) {
    const auto f = gordon_violation_frequency(512, 8, ts[j], 5000, rng.split(j), o.threads);
    const auto e = f.estimate();
    const double bound = 2 * std::exp(-ts[j] * ts[j] / 2);
    b.metric(fmt("violation_t%.1f", ts[j]), e.value, e.std_error);
    pass = pass && e.value <= bound + 3 * e.std_error;
    detail << fmt("t=%.1f: %.4f vs %.4f; ", ts[j], e.value, bound);
  }
  b.r.pass = pass;
  b.r.detail = detail.str();
}

struct RateDraws {
  std::vector<double> deviation;
  std::vector<double> defect;
};

RateDraws rate_draws(std::size_t n, const RngStream& rng, unsigned threads) {
  const std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))) / 2;
  const auto both = parallel_map(2000, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto lu = sample_lambda_u(n, k, r);
    if (lu.spectrum.degenerate()) return std::pair<double, double>{NAN, NAN};
    return std::pair<double, double>{lambda_deviation(lu.spectrum), cancellation_defect_exact(lu)};
  });
  RateDraws out;
  for (const auto& [d, c] : both)
    if (!std::isnan(d)) {
      out.deviation.push_back(d);
      out.defect.push_back(c);
    }
  return out;
}

// 5, 6
void rate(Builder& b, const SuiteOptions& o, bool cancellation) {
  const int id = cancellation ? 6 : 5;
  const RngStream rng = criterion_stream(o, id);
  const auto small = rate_draws(256, rng.split(0), o.threads);
  const auto large = rate_draws(4096, rng.split(1), o.threads);
  const auto& s = cancellation ? small.defect : small.deviation;
  const auto& l = cancellation ? large.defect : large.deviation;
  b.trace(s);
  b.trace(l);
  const double ms = median(s), ml = median(l), ratio = ms / ml;
  const double lo = cancellation ? 2.5 : 1.4, hi = cancellation ? 6.0 : 2.6;
  b.metric("median_n256", ms);
  b.metric("median_n4096", ml);
  b.metric("ratio", ratio);
  b.r.pass = ratio >= lo && ratio <= hi;
  b.r.detail = fmt("median ratio %.3f (need [%.1f, %.1f], theory %.0f); k = 8 and 32", ratio, lo, hi,
                   cancellation ? 4.0 : 2.0);
}

// 7
void coefficient(Builder& b, const SuiteOptions&) {
  const double l = log_coefficient_ratio(400, 20);
  const double gap = std::abs(l + 400.0 / 1600.0);
  b.metric("log_ratio", l);
  b.r.pass = gap <= 0.1;
  b.r.detail = fmt("log ratio %.6f, |. + k^2/(4n)| = %.4f (need <= 0.1)", l, gap);
}

// 8
void coefficient_event(Builder& b, const SuiteOptions& o) {
  const auto f = coefficient_event_frequency(1024, 3, 2000, criterion_stream(o, 8), 0.1, o.threads);
  const auto e = f.estimate();
  b.metric("frequency", e.value, e.std_error);
  b.metric("discarded", static_cast<double>(f.discarded));
  b.r.pass = e.value >= 0.99;
  b.r.detail = fmt("frequency %.4f (need >= 0.99), %zu degenerate draws discarded", e.value, f.discarded);
}

struct ReducedDraws {
  std::vector<double> statistics;
  std::vector<double> bounds;
};

constexpr std::size_t kDirectSamples = 4000000;

ReducedDraws criterion9_reduced(const SuiteOptions& o) {
  const std::size_t n = 100;
  const auto f = BallDensity::normalized_indicator(n, CoordinateSet::cap(cap_threshold_for_measure(n, 0.05)));
  const RngStream rng = criterion_stream(o, 9).split(1);
  const auto pairs = parallel_map(300, o.threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto lu = sample_lambda_u(n, 1, r);
    return std::pair<double, double>{reduced_integral_statistic(f, lu, n).statistic,
                                     cauchy_schwarz_bound(f, lu, n).value};
  });
  ReducedDraws out;
  for (const auto& [s, c] : pairs) {
    out.statistics.push_back(s);
    out.bounds.push_back(c);
  }
  return out;
}

TheoremEventResult criterion10_draws(const SuiteOptions& o) {
  const std::size_t n = 400;
  TheoremEventOptions opt;
  opt.alpha2 = 0.5;
  opt.threads = o.threads;
  const auto f = BallDensity::normalized_indicator(n, CoordinateSet::cap(cap_threshold_for_measure(n, std::exp(-10.0))));
  return theorem_event_frequency(n, f, 500, criterion_stream(o, 10), opt);
}

// 9
void equal_in_distribution(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 100;
  const auto a = CoordinateSet::cap(cap_threshold_for_measure(n, 0.05));
  const RngStream rng = criterion_stream(o, 9).split(0);
  const auto direct = parallel_map(300, o.threads, [&](std::size_t i) {
    RngStream rh = rng.split(2 * i);
    const Subspace h = sample_grassmannian(n, n / 2, rh);
    return geometric_mean_direct(n, a, h, kDirectSamples, rng.split(2 * i + 1)).statistic;
  });
  const auto reduced = criterion9_reduced(o);
  b.trace(direct);
  b.trace(reduced.statistics);
  const double ks = ks_two_sample(direct, reduced.statistics);
  b.metric("ks", ks);
  b.metric("median_direct", median(direct));
  b.metric("median_reduced", median(reduced.statistics));
  b.r.pass = ks < 0.1;
  b.r.detail = fmt("KS = %.4f (need < 0.1), 300 vs 300 draws, %zu MC samples per side", ks, kDirectSamples);
}

// 10
void small_measure_event(Builder& b, const SuiteOptions& o) {
  const auto res = criterion10_draws(o);
  b.trace(res.statistics);
  const auto e = res.event.estimate();
  b.metric("frequency", e.value, e.std_error);
  b.metric("median_statistic", median(res.statistics));
  b.metric("bound_frequency", res.bound_event.value());
  b.r.pass = e.value >= 0.9;
  b.r.detail = fmt("frequency of statistic >= 0.9 is %.3f (need >= 0.9); median statistic %.4f", e.value,
                   median(res.statistics));
}

// 11
void cs_ordering(Builder& b, const SuiteOptions& o) {
  const auto r9 = criterion9_reduced(o);
  const auto r10 = criterion10_draws(o);
  std::size_t total = 0, ok = 0;
  double worst = -INFINITY;
  auto check = [&](const std::vector<double>& s, const std::vector<double>& c) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++total;
      ok += c[i] <= s[i] + 1e-8 ? 1 : 0;
      worst = std::max(worst, c[i] - s[i]);
    }
  };
  check(r9.statistics, r9.bounds);
  check(r10.statistics, r10.bounds);
  b.trace(r9.bounds);
  b.trace(r10.bounds);
  b.metric("fraction_ordered", static_cast<double>(ok) / static_cast<double>(total));
  b.metric("max_bound_minus_statistic", worst);
  b.r.pass = ok == total;
  b.r.detail = fmt("%zu of %zu draws have bound <= statistic + 1e-8; max(bound - statistic) = %.2e", ok, total, worst);
}

// 12
void extremal_family(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 400;
  const double sigma = std::pow(static_cast<double>(n), -1.0 / 3.0);
  TheoremEventOptions opt;
  opt.threads = o.threads;
  opt.compute_bounds = false;
  const auto f = BallDensity::normalized_indicator(n, CoordinateSet::cap(cap_threshold_for_measure(n, sigma)));
  const auto res = theorem_event_frequency(n, f, 500, criterion_stream(o, 12), opt);
  b.trace(res.statistics);
  const auto e = res.event.estimate();
  b.metric("frequency", e.value, e.std_error);
  b.r.pass = e.value >= 0.95;
  b.r.detail = fmt("frequency %.3f (need >= 0.95), sigma(A) = %.4f", e.value, sigma);
}

// 13
void tail(Builder& b, const SuiteOptions&) {
  const double rho = 0.5, a1 = rho * rho / 6, a2 = AnalyticConstants::default_alpha2(a1, rho);
  bool pass = true;
  std::size_t admissible = 0;
  std::ostringstream detail;
  const std::pair<std::size_t, std::size_t> grid[] = {{400, 1}, {1600, 1}, {6400, 1}, {6400, 3}};
  for (const auto& [n, k] : grid) {
    const auto rep = evaluate_tail(n, k, rho, a1, a2);
    b.metric(fmt("brute_n%zu_k%zu", n, k), rep.brute_value);
    b.metric(fmt("analytic_n%zu_k%zu", n, k), rep.analytic_bound);
    if (!rep.violations.empty()) {
      detail << fmt("(%zu,%zu) inadmissible; ", n, k);
      continue;
    }
    ++admissible;
    pass = pass && rep.holds();
    detail << fmt("(%zu,%zu) %.3e <= %.3e; ", n, k, rep.brute_value, rep.analytic_bound);
  }
  const auto id = coarea_ball_identity(40, 4);
  const double rel = std::abs(id.lhs - id.rhs) / std::abs(id.rhs);
  b.metric("identity_lhs", id.lhs);
  b.metric("identity_rhs", id.rhs);
  b.metric("admissible_points", static_cast<double>(admissible));
  b.r.pass = pass && admissible > 0 && rel <= 1e-8;
  detail << fmt("identity (40,4): %.10g vs %.10g", id.lhs, id.rhs);
  b.r.detail = detail.str();
}

// 14
void small_ball(Builder& b, const SuiteOptions& o) {
  const auto f = small_ball_event_frequency(4096, 2, 0.5, 1000, criterion_stream(o, 14), 0.95, 0.1, o.threads);
  b.trace(f.ratios);
  const auto e = f.event.estimate();
  b.metric("frequency", e.value, e.std_error);
  b.metric("not_applicable", static_cast<double>(f.not_applicable));
  b.r.pass = e.value >= 0.99;
  b.r.detail = fmt("ratio >= 0.95 in %.1f%% of 1000 draws (need >= 99%%), %zu outside the window", 100 * e.value,
                   f.not_applicable);
}

// 15
void protocol(Builder& b, const SuiteOptions& o) {
  const auto cfg = ProtocolConfig::defaults(128);
  const RngStream rng = criterion_stream(o, 15);
  const auto inst = make_instances(cfg.n, 300, rng.split(0));
  const auto list = presample_shared(cfg, rng.split(1), o.threads);
  const auto res = run_protocol(cfg, inst, list, rng.split(2), o.threads);
  const auto ih = res.in_h.estimate(), ip = res.in_hperp.estimate();
  for (const auto& t : res.transcripts) b.digest.add(static_cast<std::uint64_t>(t.j_hat));
  b.metric("success_rate", res.success_rate, res.std_error);
  b.metric("success_in_h", ih.value, ih.std_error);
  b.metric("success_in_hperp", ip.value, ip.std_error);
  b.metric("bits_sent", static_cast<double>(res.bits_sent));
  // Reported only: the public-coin variant draws its own list entry per instance.
  const auto shared = run_shared_randomness(cfg, inst, rng.split(3), o.threads);
  b.metric("shared_randomness_success", shared.success_rate, shared.std_error);
  const bool sym = std::abs(ih.value - ip.value) <= 3 * std::hypot(ih.std_error, ip.std_error);
  b.r.pass = cfg.dim_e == 33 && res.success_rate >= 0.7 && res.bits_sent == 6 + 15 && sym;
  b.r.detail = fmt("success %.3f (need >= 0.7), in-H %.3f vs in-H-perp %.3f, bits %zu; shared-randomness variant %.3f",
                   res.success_rate, ih.value, ip.value, res.bits_sent, shared.success_rate);
}

// 16
void half_net(Builder& b, const SuiteOptions& o) {
  const RngStream rng = criterion_stream(o, 16);
  const auto worst = parallel_map(100, o.threads, [&](std::size_t t) {
    RngStream r = rng.split(t);
    const auto net = uniform_net(4, 5000, r);
    const auto c = half_net_check(net, 100000, r);
    return c.is_half_net ? c.worst_probe : -1.0 - c.worst_probe;
  });
  b.trace(worst);
  std::size_t good = 0;
  for (double w : worst) good += w >= 0.0 ? 1 : 0;
  b.metric("half_nets", static_cast<double>(good));
  b.r.pass = good >= 99;
  b.r.detail = fmt("%zu of 100 nets cover all 1e5 probes within distance 1/2 (need >= 99)", good);
}

// 17
void projection(Builder& b, const SuiteOptions& o) {
  const RngStream rng = criterion_stream(o, 17);
  const std::size_t trials = 500000;
  const auto f1 = projection_tail(100, 50, 0.1, trials, rng.split(0), o.threads);
  const auto f2 = projection_tail(400, 200, 0.1, trials, rng.split(1), o.threads);
  const auto e1 = f1.estimate(), e2 = f2.estimate();
  const double ratio = std::log(e2.value) / std::log(e1.value);
  b.metric("freq_d100", e1.value, e1.std_error);
  b.metric("freq_d400", e2.value, e2.std_error);
  b.metric("log_ratio", ratio);
  b.r.pass = f2.hits > 0 && ratio >= 2.0;
  b.r.detail = fmt("log f(400) / log f(100) = %.3f (need >= 2, sub-Gaussian theory 4)", ratio);
}

// 18
void rectangle(Builder& b, const SuiteOptions& o) {
  const std::size_t n = 200;
  const double sigma = 0.02;
  const auto a = CoordinateSet::cap(cap_threshold_for_measure(n, sigma));
  const RngStream rng = criterion_stream(o, 18);
  RectangleParams p;
  p.threads = o.threads;
  const auto window = GrassmannianSubset::spectral_window(
      Subspace::coordinate(n, 1).basis(), [](const SingularSpectrum& s) { return s.values[0] * s.values[0] > 0.5; },
      "lambda1^2>1/2");
  const auto all = rectangle_inequality_check(Rectangle{a, GrassmannianSubset::all(), std::nullopt}, n, p, rng.split(0));
  const auto win = rectangle_inequality_check(Rectangle{a, window, std::nullopt}, n, p, rng.split(1));
  for (const auto* c : {&all, &win}) {
    const std::string tag = c == &all ? "all" : "window";
    b.metric("lhs_" + tag, c->lhs, c->std_error);
    b.metric("rhs_" + tag, c->rhs, 0.8 * c->measures.mu0.std_error);
    b.metric("mu1_" + tag, c->measures.mu1.value, c->measures.mu1.std_error);
    b.metric("mu2_" + tag, c->measures.mu2.value, c->measures.mu2.std_error);
  }
  const auto& m = all.measures;
  const bool sym = std::abs(m.mu1.value - sigma) <= 3 * m.mu1.std_error;
  b.r.pass = all.pass && win.pass && sym;
  b.r.detail = fmt("B=all %.5f >= %.5f; window (accept %.2f) %.5f >= %.5f; E sigma_H = %.5f +- %.5f vs %.2f", all.lhs,
                   all.rhs, win.measures.acceptance(), win.lhs, win.rhs, m.mu1.value, m.mu1.std_error, sigma);
}

// 19
void partition(Builder& b, const SuiteOptions&) {
  const double rho = 0.5, a1 = rho * rho / 6, a2 = AnalyticConstants::default_alpha2(a1, rho);
  std::vector<double> bits;
  bool third = true;
  for (std::size_t n : {100u, 400u, 1600u}) {
    const auto audit = partition_audit(synthetic_partition(6), 1.0 / 9.0, n, 1.0, a2);
    third = third && std::abs(audit.in_h.error_bound - 1.0 / 3.0) <= 1e-15 &&
            std::abs(audit.in_hperp.error_bound - 1.0 / 3.0) <= 1e-15;
    bits.push_back(audit.bound_bits);
    b.metric(fmt("bound_bits_n%zu", n), audit.bound_bits);
  }
  const double s1 = (bits[1] - bits[0]) / 10.0, s2 = (bits[2] - bits[1]) / 20.0;
  const bool linear = s1 > 0 && std::abs(s1 - s2) <= 1e-9 * std::abs(s1);
  b.metric("slope_per_sqrt_n", s1);
  b.r.pass = third && linear;
  b.r.detail = fmt("sqrt(1*1/9) = 1/3 %s; slopes %.6g and %.6g bits per unit sqrt(n)", third ? "reproduced" : "MISSED", s1,
                   s2);
}

void run_body(int id, Builder& b, const SuiteOptions& o);

// 20
void determinism(Builder& b, const SuiteOptions& o) {
  std::ostringstream bad;
  bool pass = true;
  for (int id = 1; id < kCriterionCount; ++id) {
    const auto one = run_criterion(id, {o.seed, 1});
    const auto three = run_criterion(id, {o.seed, 3});
    const bool same = one.digest == three.digest;
    b.metric(fmt("match_%d", id), same ? 1.0 : 0.0);
    if (!same) {
      pass = false;
      bad << id << ' ';
    }
  }
  b.r.pass = pass;
  b.r.detail = pass ? "criteria 1-19 reproduce bit-identically with 1 and 3 threads"
                    : "digest mismatch in criteria: " + bad.str();
}

void run_body(int id, Builder& b, const SuiteOptions& o) {
  switch (id) {
    case 1: return coarea(b, o);
    case 2: return wishart(b, o);
    case 3: return complement_identity(b, o);
    case 4: return gordon(b, o);
    case 5: return rate(b, o, false);
    case 6: return rate(b, o, true);
    case 7: return coefficient(b, o);
    case 8: return coefficient_event(b, o);
    case 9: return equal_in_distribution(b, o);
    case 10: return small_measure_event(b, o);
    case 11: return cs_ordering(b, o);
    case 12: return extremal_family(b, o);
    case 13: return tail(b, o);
    case 14: return small_ball(b, o);
    case 15: return protocol(b, o);
    case 16: return half_net(b, o);
    case 17: return projection(b, o);
    case 18: return rectangle(b, o);
    case 19: return partition(b, o);
    case 20: return determinism(b, o);
    default: throw DomainError("run_criterion: id must lie in [1, 20]");
  }
}

}  // namespace

std::string_view criterion_title(int id) {
  if (id < 1 || id > kCriterionCount) throw DomainError("criterion_title: id must lie in [1, 20]");
  return kTitles[id - 1];
}

CriterionResult run_criterion(int id, const SuiteOptions& options) {
  Builder b;
  b.r.id = id;
  b.r.title = std::string(criterion_title(id));
  const auto start = std::chrono::steady_clock::now();
  try {
    run_body(id, b, options);
  } catch (const Error& e) {
    b.r.pass = false;
    b.r.detail = std::string("error: ") + e.what();
  }
  b.r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  b.r.digest = b.digest.value();
  return b.r;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace sphlab
