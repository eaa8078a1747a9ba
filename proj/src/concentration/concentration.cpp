#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sphlab/concentration_lab.hpp"
#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/numcore/parallel.hpp"

namespace sphlab {

// BallDensity

BallDensity BallDensity::normalized_indicator(std::size_t n, CoordinateSet a, const QuadratureRule& rule) {
  const double m = coordinate_set_measure(n, a, rule).value;
  if (!(m > 0.0)) throw DomainError("normalized_indicator: set has zero measure");
  BallDensity d;
  d.k_ = a.k();
  d.measure_ = m;
  d.sup_norm_ = 1.0 / m;
  d.label_ = a.label();
  d.set_ = a;
  const double inv = 1.0 / m;
  d.f_ = [set = std::move(a), inv](std::span<const double> x) { return set.contains(x) ? inv : 0.0; };
  return d;
}

BallDensity BallDensity::constant_one(std::size_t k) {
  if (k == 0) throw DomainError("constant_one: k must be positive");
  BallDensity d;
  d.k_ = k;
  d.f_ = [](std::span<const double>) { return 1.0; };
  d.label_ = "one";
  return d;
}

BallDensity BallDensity::function(std::size_t k, Function f, double sup_norm, std::string label) {
  if (k == 0 || !f) throw DomainError("BallDensity::function: need k > 0 and a callable");
  if (!(sup_norm >= 0.0) || !std::isfinite(sup_norm)) throw DomainError("BallDensity::function: bad sup norm");
  BallDensity d;
  d.k_ = k;
  d.f_ = std::move(f);
  d.sup_norm_ = sup_norm;
  d.label_ = std::move(label);
  return d;
}

double BallDensity::operator()(std::span<const double> x) const { return f_(x); }

std::optional<std::vector<Interval>> BallDensity::support_intervals() const {
  if (!set_ || k_ != 1 || set_->kind() == CoordinateSet::Kind::predicate) return std::nullopt;
  return set_->intervals_1d();
}

namespace {

double half_dim(std::size_t n, std::size_t k) {
  const double m = 0.5 * static_cast<double>(n);
  if (!(static_cast<double>(k) + 1.0 <= m)) throw DomainError("reduced integral: need k <= n/2 - 1");
  return m;
}

void require_nondegenerate(const RotationWithSpectrum& lu) {
  if (lu.spectrum.degenerate()) throw DegenerateInput("spectrum contains a cosine equal to 0 or 1");
  const std::size_t k = lu.spectrum.k();
  if (lu.rotation.rows() != k || lu.rotation.cols() != k) throw DomainError("rotation does not match spectrum size");
}

std::vector<double> complementary(const SingularSpectrum& s) {
  std::vector<double> mu;
  for (double l : s.values) mu.push_back(std::sqrt(1.0 - l * l));
  return mu;
}

// U diag(d) U^T
Matrix conjugated_diagonal(const Matrix& u, std::span<const double> d) {
  return u * Matrix::diagonal(d) * u.transpose();
}

double geometric_mean_error(double gh, double gp, double se_h, double se_p) {
  if (gh <= 0.0 || gp <= 0.0) return 0.0;
  const double s = std::sqrt(gh * gp);
  return 0.5 * s * std::hypot(se_h / gh, se_p / gp);
}

}  // namespace

GeometricMeanSample geometric_mean_direct(std::size_t n, const CoordinateSet& a, const Subspace& h,
                                          std::size_t samples, const RngStream& rng, const QuadratureRule& rule) {
  if (h.ambient_dim() != n) throw DomainError("geometric_mean_direct: subspace lives in a different dimension");
  const double sigma = coordinate_set_measure(n, a, rule).value;
  if (!(sigma > 0.0)) throw DomainError("geometric_mean_direct: set has zero measure");
  RngStream r1 = rng.split(0);
  RngStream r2 = rng.split(1);
  const auto e1 = restricted_measure_mc(a, h, samples, r1);
  const auto e2 = restricted_measure_mc(a, complement(h), samples, r2);
  GeometricMeanSample s;
  s.n = n;
  s.k = a.k();
  s.subspace_stream = rng.stream_index();
  s.method = GeometricMeanSample::Method::direct_mc;
  s.g_h = e1.value / sigma;
  s.g_hperp = e2.value / sigma;
  s.statistic = std::sqrt(s.g_h * s.g_hperp);
  s.std_error = geometric_mean_error(s.g_h, s.g_hperp, e1.std_error / sigma, e2.std_error / sigma);
  return s;
}

GeometricMeanSample reduced_integral_statistic(const BallDensity& f, const RotationWithSpectrum& lu, std::size_t n,
                                               const QuadratureRule& rule) {
  require_nondegenerate(lu);
  const std::size_t k = lu.spectrum.k();
  if (f.k() > k) throw DomainError("reduced_integral_statistic: f depends on more than k coordinates");
  const double m = half_dim(n, k);
  const auto& lambda = lu.spectrum.values;
  const auto mu = complementary(lu.spectrum);

  GeometricMeanSample s;
  s.n = n;
  s.k = k;
  s.method = GeometricMeanSample::Method::reduced_integral;

  double se_h = 0.0;
  double se_p = 0.0;
  const auto intervals = f.support_intervals();
  if (k == 1 && intervals) {
    // f(lambda x) = 1/sigma exactly on x in [lo/lambda, hi/lambda].
    auto side = [&](double scale) {
      double v = 0.0;
      for (const auto& iv : *intervals) v += interval_measure(m, iv.lo / scale, iv.hi / scale, rule.nodes_1d);
      return v / f.set_measure();
    };
    s.g_h = side(lambda[0]);
    s.g_hperp = side(mu[0]);
  } else {
    auto side = [&](std::span<const double> d) {
      const Matrix a = conjugated_diagonal(lu.rotation, d);
      std::vector<double> y(k);
      return marginal_expectation(m, k,
                                  [&](std::span<const double> x) {
                                    for (std::size_t i = 0; i < k; ++i) y[i] = dot(a.row(i), x);
                                    return f(y);
                                  },
                                  rule);
    };
    const auto eh = side(lambda);
    const auto ep = side(mu);
    s.g_h = eh.value;
    s.g_hperp = ep.value;
    se_h = eh.std_error;
    se_p = ep.std_error;
  }
  s.statistic = std::sqrt(std::max(0.0, s.g_h * s.g_hperp));
  s.std_error = geometric_mean_error(s.g_h, s.g_hperp, se_h, se_p);
  return s;
}

double log_psi(std::span<const double> x, const RotationWithSpectrum& lu, std::size_t n) {
  const std::size_t k = lu.spectrum.k();
  if (x.size() != k) throw DomainError("log_psi: point dimension differs from k");
  const double p4 = (half_dim(n, k) - static_cast<double>(k) - 2.0) / 4.0;
  const auto y = multiply_t(lu.rotation, x);
  double a = 1.0;
  double b = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double l2 = lu.spectrum.values[i] * lu.spectrum.values[i];
    a -= y[i] * y[i] / l2;
    b -= y[i] * y[i] / (1.0 - l2);
  }
  if (a <= 0.0 || b <= 0.0) return -std::numeric_limits<double>::infinity();
  return p4 * (std::log(a) + std::log(b));
}

Estimate cauchy_schwarz_bound(const BallDensity& f, const RotationWithSpectrum& lu, std::size_t n,
                              const QuadratureRule& rule) {
  require_nondegenerate(lu);
  const std::size_t k = lu.spectrum.k();
  if (f.k() > k) throw DomainError("cauchy_schwarz_bound: f depends on more than k coordinates");
  const double m = half_dim(n, k);
  const double p4 = (m - static_cast<double>(k) - 2.0) / 4.0;
  const auto& lambda = lu.spectrum.values;
  const auto mu = complementary(lu.spectrum);

  double log_prefactor = log_coarea_constant(m, static_cast<double>(k));
  for (std::size_t j = 0; j < k; ++j) log_prefactor -= 0.5 * (std::log(lambda[j]) + std::log(mu[j]));
  const double prefactor = std::exp(log_prefactor);

  if (k == 1) {
    // x = r sin(phi) with r = min(lambda, mu): the factor belonging to r
    // becomes cos^2(phi) exactly.
    const double l = lambda[0];
    const double c = mu[0];
    const double r = std::min(l, c);
    const auto& gl = gauss_legendre(rule.nodes_1d);
    auto weight = [&](double phi) {
      const double s = std::sin(phi);
      const double co = std::cos(phi);
      const double a = r == l ? co * co : 1.0 - (r * s / l) * (r * s / l);
      const double b = r == c ? co * co : 1.0 - (r * s / c) * (r * s / c);
      if (a <= 0.0 || b <= 0.0) return 0.0;
      return r * co * std::pow(a, p4) * std::pow(b, p4);
    };
    double total = 0.0;
    if (const auto intervals = f.support_intervals()) {
      for (const auto& iv : *intervals) {
        const double lo = std::asin(std::clamp(iv.lo / r, -1.0, 1.0));
        const double hi = std::asin(std::clamp(iv.hi / r, -1.0, 1.0));
        total += integrate(weight, lo, hi, gl);
      }
      total /= f.set_measure();
    } else {
      double x[1];
      total = integrate(
          [&](double phi) {
            x[0] = r * std::sin(phi);
            return f(std::span<const double>(x, 1)) * weight(phi);
          },
          -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, gl);
    }
    return {prefactor * total, 0.0};
  }

  const Matrix& u = lu.rotation;
  if (k == 2) {
    // Polar coordinates in y = U^T x, out to the exact edge of the support
    // along each ray; t = t_max sin(phi) smooths the vanishing factor.
    const auto& gl = gauss_legendre(rule.nodes_2d);
    double y[2];
    double x[2];
    const double v = integrate(
        [&](double th) {
          const double w0 = std::cos(th);
          const double w1 = std::sin(th);
          const double al = w0 * w0 / (lambda[0] * lambda[0]) + w1 * w1 / (lambda[1] * lambda[1]);
          const double be = w0 * w0 / (mu[0] * mu[0]) + w1 * w1 / (mu[1] * mu[1]);
          const double t_max = 1.0 / std::sqrt(std::max(al, be));
          return integrate(
              [&](double phi) {
                const double s = std::sin(phi);
                const double co = std::cos(phi);
                const double t = t_max * s;
                const double a = al >= be ? co * co : 1.0 - t * t * al;
                const double b = al >= be ? 1.0 - t * t * be : co * co;
                if (a <= 0.0 || b <= 0.0) return 0.0;
                y[0] = t * w0;
                y[1] = t * w1;
                x[0] = u(0, 0) * y[0] + u(0, 1) * y[1];
                x[1] = u(1, 0) * y[0] + u(1, 1) * y[1];
                return f(std::span<const double>(x, 2)) * std::pow(a, p4) * std::pow(b, p4) * t_max * t_max * s * co;
              },
              0.0, 0.5 * std::numbers::pi, gl);
        },
        0.0, 2.0 * std::numbers::pi, gl);
    return {prefactor * v, 0.0};
  }

  // k >= 3: the support lies in the ball of radius min(max lambda, max mu).
  const double radius = std::min(*std::max_element(lambda.begin(), lambda.end()), *std::max_element(mu.begin(), mu.end()));
  std::vector<double> x(k);
  std::vector<double> yv(k);
  const auto est = ball_integral(
      k,
      [&](std::span<const double> w) {
        for (std::size_t i = 0; i < k; ++i) yv[i] = radius * w[i];
        double a = 1.0;
        double b = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
          a -= yv[i] * yv[i] / (lambda[i] * lambda[i]);
          b -= yv[i] * yv[i] / (mu[i] * mu[i]);
        }
        if (a <= 0.0 || b <= 0.0) return 0.0;
        for (std::size_t i = 0; i < k; ++i) x[i] = dot(u.row(i), yv);
        return f(x) * std::pow(a, p4) * std::pow(b, p4);
      },
      rule);
  const double scale = prefactor * std::pow(radius, static_cast<double>(k));
  return {scale * est.value, scale * est.std_error};
}

TheoremEventResult theorem_event_frequency(std::size_t n, const BallDensity& f, std::size_t trials,
                                           const RngStream& rng, const TheoremEventOptions& options) {
  const std::size_t k = f.k();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  TheoremEventResult out;
  if (static_cast<double>(k) > options.alpha1 * sqrt_n)
    out.violations.push_back("k > alpha1*sqrt(n) violates the hypothesis of the k-coordinate theorem");
  if (std::log(f.sup_norm()) > options.alpha2 * sqrt_n)
    out.violations.push_back("||f||_inf > e^{alpha2*sqrt(n)} violates the hypothesis of the k-coordinate theorem");
  if (options.enforce_hypotheses && !out.violations.empty()) throw HypothesisViolation(out.violations.front());

  struct Draw {
    double statistic = 0.0;
    double bound = 0.0;
    int degenerate = 0;
  };
  const auto draws = parallel_map(trials, options.threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto lu = sample_lambda_u(n, k, r);
    Draw d;
    if (lu.spectrum.degenerate()) {
      d.degenerate = 1;
      return d;
    }
    d.statistic = reduced_integral_statistic(f, lu, n, options.rule).statistic;
    if (options.compute_bounds) d.bound = cauchy_schwarz_bound(f, lu, n, options.rule).value;
    return d;
  });
  for (const auto& d : draws) {
    if (d.degenerate) {
      ++out.event.discarded;
      ++out.bound_event.discarded;
      continue;
    }
    ++out.event.trials;
    out.event.hits += d.statistic >= options.threshold;
    out.statistics.push_back(d.statistic);
    if (options.compute_bounds) {
      ++out.bound_event.trials;
      out.bound_event.hits += d.bound >= options.threshold;
      out.bounds.push_back(d.bound);
    }
  }
  return out;
}

std::vector<std::vector<double>> small_ball_probes(const RotationWithSpectrum& lu, double radius, RngStream& rng,
                                                   std::size_t random_count) {
  const std::size_t k = lu.spectrum.k();
  std::vector<std::vector<double>> probes;
  probes.emplace_back(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> e(k, 0.0);
      e[i] = sign * radius;
      probes.push_back(std::move(e));
      auto col = lu.rotation.col(i);
      for (double& v : col) v *= sign * radius;
      probes.push_back(std::move(col));
    }
  }
  for (std::size_t j = 0; j < random_count; ++j) {
    const auto w = sample_unit_sphere(k, rng);
    const double r = j % 2 == 0 ? radius : radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
    std::vector<double> p(w.coords().begin(), w.coords().end());
    for (double& v : p) v *= r;
    probes.push_back(std::move(p));
  }
  return probes;
}

SmallBallResult small_ball_ratio(const RotationWithSpectrum& lu, std::size_t n, double rho,
                                 const std::vector<std::vector<double>>& probes, double alpha1,
                                 double window_constant) {
  require_nondegenerate(lu);
  const std::size_t k = lu.spectrum.k();
  const double quarter = std::pow(static_cast<double>(n), 0.25);
  SmallBallResult out;
  out.radius = rho / quarter;
  if (out.radius > 0.1) throw HypothesisViolation("rho*n^{-1/4} > 1/10 leaves the expansion window of psi");
  out.deviation = lambda_deviation(lu.spectrum);
  out.window = window_constant * (std::sqrt(alpha1) + std::numbers::sqrt2) / quarter;
  out.applicable = out.deviation <= out.window;
  const double q = (static_cast<double>(n) - static_cast<double>(k) - 2.0) / 2.0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& x : probes) {
    const double x2 = squared_norm(x);
    if (std::sqrt(x2) > out.radius * (1.0 + 1e-12)) throw DomainError("small_ball_ratio: probe outside rho n^{-1/4} B_k");
    worst = std::min(worst, log_psi(x, lu, n) - q * std::log1p(-x2));
  }
  out.ratio = probes.empty() ? 1.0 : std::exp(worst);
  return out;
}

SmallBallFrequency small_ball_event_frequency(std::size_t n, std::size_t k, double rho, std::size_t trials,
                                              const RngStream& rng, double threshold, double alpha1,
                                              unsigned threads) {
  const double radius = rho / std::pow(static_cast<double>(n), 0.25);
  const auto results = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const auto lu = sample_lambda_u(n, k, r);
    return small_ball_ratio(lu, n, rho, small_ball_probes(lu, radius, r), alpha1);
  });
  SmallBallFrequency out;
  out.event.trials = trials;
  for (const auto& s : results) {
    out.ratios.push_back(s.ratio);
    if (!s.applicable) ++out.not_applicable;
    if (s.applicable && s.ratio >= threshold) ++out.event.hits;
  }
  return out;
}

TailBoundReport evaluate_tail(std::size_t n, std::size_t k, double rho, double alpha1, double alpha2) {
  if (k == 0 || k + 1 > n) throw DomainError("evaluate_tail: need 1 <= k <= n - 1");
  AnalyticConstants c{alpha1, alpha2, rho};
  c.validate();
  TailBoundReport rep;
  rep.n = n;
  rep.k = k;
  rep.rho = rho;
  rep.alpha1 = alpha1;
  rep.alpha2 = alpha2;
  rep.violations = c.tail_violations(n, k);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double sqrt_n = std::sqrt(nd);
  rep.analytic_bound = 2.0 * alpha1 / (rho * rho) * std::exp(-alpha2 * sqrt_n);
  const double r0 = rho / std::pow(nd, 0.25);
  if (r0 >= 1.0) return rep;

  // int_{r0}^1 r^{k-1} (1-r^2)^{(n-k-2)/2} dr with r = sin(phi), on 64 panels.
  const auto& gl = gauss_legendre(64);
  const double a = std::asin(r0);
  const double b = 0.5 * std::numbers::pi;
  const int panels = 64;
  double integral = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels;
    const double hi = a + (b - a) * (p + 1) / panels;
    integral += integrate(
        [&](double phi) { return std::pow(std::sin(phi), kd - 1.0) * std::pow(std::cos(phi), nd - kd - 1.0); }, lo, hi,
        gl);
  }
  if (integral <= 0.0) return rep;
  const double log_mass = log_coarea_constant(nd, kd) + std::log(kd) + log_ball_volume(kd) + std::log(integral);
  rep.tail_mass = std::exp(log_mass);
  rep.brute_value = std::exp(log_mass + alpha2 * sqrt_n);
  return rep;
}

TailBoundReport laplace_tail_bound(std::size_t n, std::size_t k, double rho, double alpha1, double alpha2) {
  auto rep = evaluate_tail(n, k, rho, alpha1, alpha2);
  if (!rep.violations.empty()) throw HypothesisViolation(rep.violations.front());
  return rep;
}

IdentityCheck coarea_ball_identity(std::size_t n, std::size_t k) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double lhs = std::exp(log_coarea_constant(nd, kd) + log_ball_volume(kd));
  const double rhs =
      (nd - kd) / nd * std::exp(log_gamma(nd / 2 + 1) - log_gamma(kd / 2 + 1) - log_gamma((nd - kd) / 2 + 1));
  return {lhs, rhs};
}

}  // namespace sphlab
