#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += static_cast<double>(i % base) * f;
    i /= base;
    f *= inv;
  }
  return r;
}

// Randomized QMC: Halton points in [0,1)^dims with one Cranley-Patterson
// shift per replicate. Returns the mean over replicates and its standard error.
template <class Fn>
Estimate randomized_qmc(std::size_t dims, const QuadratureRule& rule, Fn&& fn) {
  if (rule.qmc_points == 0 || rule.qmc_replicates < 2) throw DomainError("QMC rule needs points and >= 2 replicates");
  const auto primes = first_primes(dims);
  std::vector<double> replicate_means;
  std::vector<double> u(dims);
  std::vector<double> shift(dims);
  for (std::size_t r = 0; r < rule.qmc_replicates; ++r) {
    RngStream rng(rule.qmc_seed, r);
    for (double& s : shift) s = rng.uniform();
    double sum = 0.0;
    for (std::size_t i = 1; i <= rule.qmc_points; ++i) {
      for (std::size_t j = 0; j < dims; ++j) {
        double v = radical_inverse(i, primes[j]) + shift[j];
        v -= std::floor(v);
        u[j] = std::clamp(v, 1e-16, 1.0 - 1e-16);
      }
      sum += fn(std::span<const double>(u));
    }
    replicate_means.push_back(sum / static_cast<double>(rule.qmc_points));
  }
  return {mean(replicate_means), std::sqrt(sample_variance(replicate_means) / static_cast<double>(rule.qmc_replicates))};
}

// Direction on S^{k-1} from k uniforms via the normal quantile.
void direction_from_uniforms(std::span<const double> u, std::span<double> out) {
  double r2 = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = normal_quantile(u[j]);
    r2 += out[j] * out[j];
  }
  const double r = std::sqrt(r2);
  if (r == 0.0) {
    out[0] = 1.0;
    return;
  }
  for (double& x : out) x /= r;
}

double pow_cos(double phi, double exponent) {
  const double c = std::max(0.0, std::cos(phi));
  if (exponent == 0.0) return 1.0;
  return std::pow(c, exponent);
}

// Integral of cos^{e}(psi) over [a, b] in [-pi/2, pi/2].
double cos_power_integral(double a, double b, double exponent, const GaussLegendreRule& rule) {
  return integrate([&](double p) { return pow_cos(p, exponent); }, a, b, rule);
}

double clamp_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

// Integral of (1 - x^2 - y^2)_+^{(n-4)/2} over [a,b] x [c,d], after x = sin t
// and y = cos(t) sin(psi): the integrand becomes cos^{n-2}(t) J(t) with
// J(t) = integral of cos^{n-3}(psi) between asin(c/cos t) and asin(d/cos t).
double box2_integral(double n, const Box& box, std::size_t nodes) {
  const double a = std::max(box[0].lo, -1.0);
  const double b = std::min(box[0].hi, 1.0);
  const double c = std::max(box[1].lo, -1.0);
  const double d = std::min(box[1].hi, 1.0);
  if (!(a < b) || !(c < d)) return 0.0;
  const double t0 = clamp_asin(a);
  const double t1 = clamp_asin(b);

  // The inner limits switch between clamped and free where cos t = |c| or |d|.
  std::vector<double> cuts{t0, t1};
  for (double v : {std::abs(c), std::abs(d)}) {
    const double t = std::acos(std::min(v, 1.0));
    for (double s : {-t, t})
      if (s > t0 && s < t1) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());

  const auto& rule = gauss_legendre(nodes);
  auto outer = [&](double t) {
    const double r = std::cos(t);
    if (r <= 0.0) return 0.0;
    const double lo = clamp_asin(c / r);
    const double hi = clamp_asin(d / r);
    return pow_cos(t, n - 2.0) * cos_power_integral(lo, hi, n - 3.0, rule);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(outer, cuts[i], cuts[i + 1], rule);
  return total;
}

bool relative_gap(double fine, double coarse, double tol) {
  return std::abs(fine - coarse) > tol * std::max(std::abs(fine), 1e-300);
}

Box intersect(const Box& x, const Box& y) {
  Box out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = {std::max(x[i].lo, y[i].lo), std::min(x[i].hi, y[i].hi)};
  return out;
}

bool box_empty(const Box& b) {
  return std::any_of(b.begin(), b.end(), [](const Interval& iv) { return !(iv.lo < iv.hi); });
}

constexpr std::size_t kMaxInclusionExclusionBoxes = 10;

}  // namespace

double interval_measure(double m, double lo, double hi, std::size_t nodes) {
  if (!(m >= 2.0)) throw DomainError("interval_measure: need m >= 2");
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (!(lo < hi)) return 0.0;
  if (m == 2.0) return (std::asin(hi) - std::asin(lo)) / std::numbers::pi;
  const double c = std::exp(log_coarea_constant(m, 1.0));
  return c * cos_power_integral(std::asin(lo), std::asin(hi), m - 2.0, gauss_legendre(nodes));
}

Estimate marginal_expectation(double m, std::size_t k, const std::function<double(std::span<const double>)>& g,
                              const QuadratureRule& rule) {
  if (k == 0 || !(static_cast<double>(k) < m)) throw DomainError("marginal_expectation: need 1 <= k < m");
  const double c = std::exp(log_coarea_constant(m, static_cast<double>(k)));
  if (k == 1) {
    const auto& gl = gauss_legendre(rule.nodes_1d);
    double x[1];
    const double v = integrate(
        [&](double phi) {
          x[0] = std::sin(phi);
          return g(std::span<const double>(x, 1)) * pow_cos(phi, m - 2.0);
        },
        -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, gl);
    return {c * v, 0.0};
  }
  if (k == 2) {
    const auto& gl = gauss_legendre(rule.nodes_2d);
    double x[2];
    const double v = integrate(
        [&](double phi) {
          const double r = std::sin(phi);
          const double angular = integrate(
              [&](double th) {
                x[0] = r * std::cos(th);
                x[1] = r * std::sin(th);
                return g(std::span<const double>(x, 2));
              },
              0.0, 2.0 * std::numbers::pi, gl);
          return angular * r * pow_cos(phi, m - 3.0);
        },
        0.0, 0.5 * std::numbers::pi, gl);
    return {c * v, 0.0};
  }
  // r^2 ~ Beta(k/2, (m-k)/2), direction uniform on S^{k-1}.
  const double a = 0.5 * static_cast<double>(k);
  const double b = 0.5 * (m - static_cast<double>(k));
  std::vector<double> x(k);
  return randomized_qmc(k + 1, rule, [&](std::span<const double> u) {
    const double r = std::sqrt(beta_quantile(a, b, u[0]));
    direction_from_uniforms(u.subspan(1), x);
    for (double& v : x) v *= r;
    return g(x);
  });
}

Estimate ball_integral(std::size_t k, const std::function<double(std::span<const double>)>& g,
                       const QuadratureRule& rule) {
  if (k == 0) throw DomainError("ball_integral: k must be positive");
  if (k == 1) {
    double x[1];
    return {integrate(
                [&](double t) {
                  x[0] = t;
                  return g(std::span<const double>(x, 1));
                },
                -1.0, 1.0, gauss_legendre(rule.nodes_1d)),
            0.0};
  }
  if (k == 2) {
    const auto& gl = gauss_legendre(rule.nodes_2d);
    double x[2];
    return {integrate(
                [&](double r) {
                  return r * integrate(
                                 [&](double th) {
                                   x[0] = r * std::cos(th);
                                   x[1] = r * std::sin(th);
                                   return g(std::span<const double>(x, 2));
                                 },
                                 0.0, 2.0 * std::numbers::pi, gl);
                },
                0.0, 1.0, gl),
            0.0};
  }
  const double vol = ball_volume(k);
  const double inv_k = 1.0 / static_cast<double>(k);
  std::vector<double> x(k);
  auto est = randomized_qmc(k + 1, rule, [&](std::span<const double> u) {
    const double r = std::pow(u[0], inv_k);
    direction_from_uniforms(u.subspan(1), x);
    for (double& v : x) v *= r;
    return g(x);
  });
  return {vol * est.value, vol * est.std_error};
}

MeasureResult coordinate_set_measure(std::size_t n, const CoordinateSet& a, const QuadratureRule& rule) {
  const std::size_t k = a.k();
  if (k + 1 > n) throw DomainError("coordinate_set_measure: need k <= n - 1");
  MeasureResult out;
  if (a.covers_ball()) {
    out.value = 1.0;
    out.method = MeasureResult::Method::exact;
    return out;
  }
  const double nd = static_cast<double>(n);

  if (k == 1 && a.kind() != CoordinateSet::Kind::predicate) {
    auto measure_with = [&](std::size_t nodes) {
      double s = 0.0;
      for (const auto& iv : a.intervals_1d()) s += interval_measure(nd, iv.lo, iv.hi, nodes);
      return s;
    };
    out.value = measure_with(rule.nodes_1d);
    out.coarse_warning = relative_gap(out.value, measure_with(std::max<std::size_t>(rule.nodes_1d / 2, 1)), 1e-8);
    out.method = MeasureResult::Method::gauss_legendre;
    return out;
  }

  if (k == 2 && a.kind() != CoordinateSet::Kind::predicate && a.boxes().size() <= kMaxInclusionExclusionBoxes) {
    const double c = coarea_constant(n, 2);
    const auto& boxes = a.boxes();
    auto measure_with = [&](std::size_t nodes) {
      double s = 0.0;
      const std::size_t subsets = std::size_t{1} << boxes.size();
      for (std::size_t mask = 1; mask < subsets; ++mask) {
        Box inter;
        bool first = true;
        int members = 0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
          if (!(mask >> i & 1)) continue;
          ++members;
          inter = first ? boxes[i] : intersect(inter, boxes[i]);
          first = false;
        }
        if (box_empty(inter)) continue;
        s += (members % 2 == 1 ? 1.0 : -1.0) * box2_integral(nd, inter, nodes);
      }
      return c * s;
    };
    out.value = measure_with(rule.nodes_2d);
    out.coarse_warning = relative_gap(out.value, measure_with(std::max<std::size_t>(rule.nodes_2d / 2, 1)), 1e-6);
    out.method = boxes.size() == 1 ? MeasureResult::Method::gauss_legendre : MeasureResult::Method::inclusion_exclusion;
    return out;
  }

  auto est = marginal_expectation(nd, k, [&](std::span<const double> x) { return a.contains(x) ? 1.0 : 0.0; }, rule);
  out.value = est.value;
  out.std_error = est.std_error;
  out.coarse_warning = est.std_error > 1e-2 * std::max(est.value, 1e-300);
  out.method = k <= 2 ? MeasureResult::Method::gauss_legendre : MeasureResult::Method::quasi_monte_carlo;
  return out;
}

double cap_threshold_for_measure(std::size_t n, double sigma) {
  if (n < 2) throw DomainError("cap_threshold_for_measure: need n >= 2");
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("cap_threshold_for_measure: sigma must lie in (0, 1)");
  double lo = -1.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (interval_measure(static_cast<double>(n), mid, 1.0) > sigma)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Estimate restricted_measure_mc(const CoordinateSet& a, const Subspace& h, std::size_t samples, RngStream& rng) {
  if (samples == 0) throw DomainError("restricted_measure_mc: samples must be positive");
  const std::size_t k = a.k();
  if (k > h.ambient_dim()) throw DomainError("restricted_measure_mc: set depends on more coordinates than n");
  const Matrix top = h.basis().top_rows(k);
  const std::size_t d = h.dim();
  std::vector<double> x(k);
  std::size_t hits = 0;

  if (d <= k) {
    std::vector<double> g(d);
    for (std::size_t s = 0; s < samples; ++s) {
      double r2 = 0.0;
      do {
        r2 = 0.0;
        for (double& v : g) {
          v = rng.normal();
          r2 += v * v;
        }
      } while (r2 < 1e-300);
      const double inv = 1.0 / std::sqrt(r2);
      for (std::size_t i = 0; i < k; ++i) x[i] = dot(top.row(i), g) * inv;
      if (a.contains(x)) ++hits;
    }
    return binomial_estimate(hits, samples);
  }

  // Only the first k coordinates matter. With top = P S Q^T, a uniform point
  // basis * g/|g| has first coordinates P S z / sqrt(|z|^2 + chi^2_{d-k}),
  // z ~ N(0, I_k), so each sample costs O(k^2) instead of O(k d).
  const auto eig = symmetric_eigen(top * top.transpose());
  Matrix ps(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    const double s = std::sqrt(std::max(0.0, eig.values[j]));
    for (std::size_t i = 0; i < k; ++i) ps(i, j) = eig.vectors(i, j) * s;
  }
  std::chi_squared_distribution<double> rest(static_cast<double>(d - k));
  std::vector<double> z(k);
  for (std::size_t s = 0; s < samples; ++s) {
    double r2 = 0.0;
    do {
      r2 = 0.0;
      for (double& v : z) {
        v = rng.normal();
        r2 += v * v;
      }
      r2 += rest(rng);
    } while (r2 < 1e-300);
    const double inv = 1.0 / std::sqrt(r2);
    for (std::size_t i = 0; i < k; ++i) x[i] = dot(ps.row(i), z) * inv;
    if (a.contains(x)) ++hits;
  }
  return binomial_estimate(hits, samples);
}

}  // namespace sphlab
