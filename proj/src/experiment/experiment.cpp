#include "sphlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "sphlab/concentration_lab.hpp"
#include "sphlab/errors.hpp"
#include "sphlab/numcore/parallel.hpp"
#include "sphlab/random_spectra.hpp"
#include "sphlab/rectangle_audit.hpp"
#include "sphlab/vsp_protocol.hpp"

namespace sphlab {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"spectra",  "coarea", "theorem1",  "conjecture", "smallball",
                                              "tailbound", "vsp",    "rectangle", "suite"};
  return names;
}

namespace {

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw UsageError(field, "cannot parse '" + text + "'");
  return v;
}

// Cursor over a descriptor; every failure reports the current offset.
struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("set descriptor: " + what, pos); }
  bool done() const { return pos >= s.size(); }
  void expect(std::string_view lit) {
    if (s.substr(pos, lit.size()) != lit) {
      // Point at the first character that differs.
      std::size_t i = 0;
      while (i < lit.size() && pos + i < s.size() && s[pos + i] == lit[i]) ++i;
      pos += i;
      fail("expected '" + std::string(lit) + "'");
    }
    pos += lit.size();
  }
  double number() {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos = static_cast<std::size_t>(p - s.data());
    return v;
  }
};

ExperimentConfig resolved(const ExperimentConfig& c) {
  ExperimentConfig r = c;
  auto dflt = [](std::size_t& v, std::size_t d) {
    if (v == 0) v = d;
  };
  const std::string& e = c.experiment;
  if (e == "spectra") {
    dflt(r.n, 200), dflt(r.k, 4), dflt(r.trials, 2000);
  } else if (e == "coarea") {
    dflt(r.n, 64), dflt(r.samples, 1000000);
    if (r.set_family.empty()) r.set_family = "box:[0,0.2]x[-0.1,0.3]";
  } else if (e == "theorem1" || e == "conjecture") {
    dflt(r.n, 400), dflt(r.trials, 500);
    if (r.set_family.empty()) r.set_family = "measure-cap:sigma=" + real(std::exp(-10.0));
    if (!r.alpha2) r.alpha2 = 0.5;
  } else if (e == "smallball") {
    dflt(r.n, 4096), dflt(r.k, 2), dflt(r.trials, 1000);
  } else if (e == "tailbound") {
    dflt(r.n, 1600), dflt(r.k, 1);
    if (!r.rho) r.rho = 0.5;
    if (!r.alpha1) r.alpha1 = *r.rho * *r.rho / 6;
  } else if (e == "vsp") {
    dflt(r.n, 128), dflt(r.trials, 300), dflt(r.samples, 20000);
  } else if (e == "rectangle") {
    dflt(r.n, 200), dflt(r.trials, 200), dflt(r.samples, 10000);
    if (r.set_family.empty()) r.set_family = "measure-cap:sigma=0.02";
  }
  if (!r.rho) r.rho = 0.5;
  if (!r.alpha1) r.alpha1 = 0.1;
  if (!r.alpha2) r.alpha2 = AnalyticConstants::default_alpha2(*r.alpha1, *r.rho);
  if (r.k == 0 && !r.set_family.empty() && r.n > 0) r.k = parse_set_descriptor(r.set_family, r.n).k();
  return r;
}

std::vector<std::pair<std::string, std::string>> params_of(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> p{
      {"n", std::to_string(c.n)},         {"k", std::to_string(c.k)},
      {"trials", std::to_string(c.trials)}, {"samples", std::to_string(c.samples)},
      {"set", c.set_family},               {"rho", real(*c.rho)},
      {"alpha1", real(*c.alpha1)},         {"alpha2", real(*c.alpha2)},
      {"threads", std::to_string(c.threads)}};
  return p;
}

AnalyticConstants constants_of(const ExperimentConfig& c) { return {*c.alpha1, *c.alpha2, *c.rho}; }

struct Out {
  std::vector<Metric> m;
  bool pass = false;
  void add(std::string name, double v, double se = 0.0) { m.push_back({std::move(name), v, se}); }
  void add(std::string name, const Estimate& e) { add(std::move(name), e.value, e.std_error); }
};

void require_k(const ExperimentConfig& c, std::size_t k) {
  if (c.k != k) throw UsageError("k", "must equal the dimension of the set descriptor (" + std::to_string(k) + ")");
}

Out spectra(const ExperimentConfig& c) {
  const RngStream rng(c.seed);
  const Subspace e = Subspace::coordinate(c.n, c.k);
  const auto cos = parallel_map(c.trials, c.threads, [&](std::size_t i) {
    RngStream r = rng.split(0).split(i);
    return principal_cosines(sample_grassmannian(c.n, c.n / 2, r), e).values;
  });
  const auto wis = parallel_map(c.trials, c.threads, [&](std::size_t i) {
    RngStream r = rng.split(1).split(i);
    return wishart_ratio_spectrum(c.n, c.k, r).values;
  });
  std::vector<double> a, w, dev;
  for (const auto& v : cos) {
    a.insert(a.end(), v.begin(), v.end());
    dev.push_back(lambda_deviation(SingularSpectrum(v)));
  }
  for (const auto& v : wis) w.insert(w.end(), v.begin(), v.end());
  Out o;
  const double ks = ks_two_sample(a, w);
  // 1% critical value of the two-sample KS statistic for equal sizes.
  const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(a.size()));
  o.add("ks_cosines_vs_wishart", ks);
  o.add("ks_critical_1pct", crit);
  o.add("mean_cosine", mean_estimate(a));
  o.add("median_lambda_deviation", median(dev));
  o.pass = ks < crit;
  return o;
}

Out coarea(const ExperimentConfig& c) {
  const auto a = parse_set_descriptor(c.set_family, c.n);
  require_k(c, a.k());
  const auto quad = coordinate_set_measure(c.n, a);
  const RngStream rng(c.seed);
  const std::size_t block = 1 << 14, blocks = (c.samples + block - 1) / block;
  const auto hits = parallel_map(blocks, c.threads, [&](std::size_t j) {
    RngStream r = rng.split(j);
    std::size_t h = 0;
    for (std::size_t i = j * block; i < std::min(c.samples, (j + 1) * block); ++i)
      h += a.contains(sample_unit_sphere(c.n, r).coords()) ? 1 : 0;
    return h;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  const Estimate mc = binomial_estimate(total, c.samples);
  Out o;
  o.add("coarea_measure", quad.value, quad.std_error);
  o.add("sphere_mc", mc);
  o.add("abs_difference", std::abs(quad.value - mc.value));
  o.pass = std::abs(quad.value - mc.value) <= 3 * std::hypot(mc.std_error, quad.std_error);
  return o;
}

Out theorem(const ExperimentConfig& c, bool explorer) {
  const auto a = parse_set_descriptor(c.set_family, c.n);
  require_k(c, a.k());
  TheoremEventOptions opt;
  opt.alpha1 = *c.alpha1;
  opt.alpha2 = *c.alpha2;
  opt.threads = c.threads;
  opt.enforce_hypotheses = !explorer;
  const auto f = BallDensity::normalized_indicator(c.n, a);
  const auto res = theorem_event_frequency(c.n, f, c.trials, RngStream(c.seed), opt);
  Out o;
  o.add("set_measure", f.set_measure());
  o.add("event_frequency", res.event.estimate());
  o.add("bound_event_frequency", res.bound_event.estimate());
  o.add("median_statistic", median(res.statistics));
  o.add("mean_statistic", mean_estimate(res.statistics));
  o.add("hypothesis_violations", static_cast<double>(res.violations.size()));
  o.pass = explorer || res.event.value() >= opt.threshold;
  return o;
}

Out smallball(const ExperimentConfig& c) {
  const auto f =
      small_ball_event_frequency(c.n, c.k, *c.rho, c.trials, RngStream(c.seed), 0.95, *c.alpha1, c.threads);
  Out o;
  o.add("event_frequency", f.event.estimate());
  o.add("not_applicable", static_cast<double>(f.not_applicable));
  o.add("median_ratio", f.ratios.empty() ? NAN : median(f.ratios));
  o.pass = f.event.value() >= 0.99;
  return o;
}

Out tailbound(const ExperimentConfig& c) {
  const auto r = laplace_tail_bound(c.n, c.k, *c.rho, *c.alpha1, *c.alpha2);
  Out o;
  o.add("tail_mass", r.tail_mass);
  o.add("brute_value", r.brute_value);
  o.add("analytic_bound", r.analytic_bound);
  o.pass = r.holds();
  return o;
}

Out vsp(const ExperimentConfig& c) {
  const auto cfg = ProtocolConfig::defaults(c.n, 3.0, c.samples);
  const RngStream rng(c.seed);
  const auto inst = make_instances(c.n, c.trials, rng.split(0));
  const auto list = presample_shared(cfg, rng.split(1), c.threads);
  const auto res = run_protocol(cfg, inst, list, rng.split(2), c.threads);
  Out o;
  o.add("success_rate", res.success_rate, res.std_error);
  o.add("success_in_h", res.in_h.estimate());
  o.add("success_in_hperp", res.in_hperp.estimate());
  o.add("bits_sent", static_cast<double>(res.bits_sent));
  o.add("dim_e", static_cast<double>(cfg.dim_e));
  o.pass = res.success_rate >= 0.7;
  return o;
}

Out rectangle(const ExperimentConfig& c) {
  const auto a = parse_set_descriptor(c.set_family, c.n);
  require_k(c, a.k());
  RectangleParams p;
  p.subspace_trials = c.trials;
  p.point_samples = c.samples;
  p.alpha1 = *c.alpha1;
  p.threads = c.threads;
  const auto r = rectangle_inequality_check(Rectangle{a, GrassmannianSubset::all(), std::nullopt}, c.n, p,
                                            RngStream(c.seed));
  Out o;
  o.add("mu0", r.measures.mu0);
  o.add("mu1", r.measures.mu1);
  o.add("mu2", r.measures.mu2);
  o.add("geometric_mean", r.lhs, r.std_error);
  o.add("rhs_0.8_mu0", r.rhs);
  o.pass = r.pass;
  return o;
}

Out suite(const ExperimentConfig& c) {
  Out o;
  o.pass = true;
  for (const auto& r : run_suite({c.seed, c.threads})) {
    o.add("criterion_" + std::to_string(r.id), r.pass ? 1.0 : 0.0);
    o.pass = o.pass && r.pass;
  }
  return o;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw UsageError("experiment", "unknown experiment '" + c.experiment + "'");
  if (c.format != "json" && c.format != "csv") throw UsageError("format", "must be json or csv");
  if (c.threads == 0) throw UsageError("threads", "must be at least 1");
  if (c.n != 0 && (c.n < 4 || c.n % 2 != 0)) throw UsageError("n", "must be an even integer >= 4");
  for (auto [name, v] : {std::pair{"rho", c.rho}, std::pair{"alpha1", c.alpha1}, std::pair{"alpha2", c.alpha2}})
    if (v && !(std::isfinite(*v) && *v > 0)) throw UsageError(name, "must be positive and finite");
  if (!c.set_family.empty()) {
    try {
      parse_set_descriptor(c.set_family, c.n == 0 ? 64 : c.n);
    } catch (const Error& e) {
      throw UsageError("set", e.what());
    }
  }
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream s;
  s << "experiment = " << c.experiment << '\n';
  s << "n = " << c.n << '\n' << "k = " << c.k << '\n' << "trials = " << c.trials << '\n';
  s << "samples = " << c.samples << '\n' << "seed = " << c.seed << '\n';
  if (!c.set_family.empty()) s << "set = " << c.set_family << '\n';
  if (c.rho) s << "rho = " << real(*c.rho) << '\n';
  if (c.alpha1) s << "alpha1 = " << real(*c.alpha1) << '\n';
  if (c.alpha2) s << "alpha2 = " << real(*c.alpha2) << '\n';
  if (!c.output.empty()) s << "out = " << c.output << '\n';
  s << "format = " << c.format << '\n' << "threads = " << c.threads << '\n';
  return s.str();
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(t, "expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key == "experiment") c.experiment = val;
    else if (key == "n") c.n = parse_number<std::size_t>(key, val);
    else if (key == "k") c.k = parse_number<std::size_t>(key, val);
    else if (key == "trials") c.trials = parse_number<std::size_t>(key, val);
    else if (key == "samples") c.samples = parse_number<std::size_t>(key, val);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, val);
    else if (key == "set") c.set_family = val;
    else if (key == "rho") c.rho = parse_number<double>(key, val);
    else if (key == "alpha1") c.alpha1 = parse_number<double>(key, val);
    else if (key == "alpha2") c.alpha2 = parse_number<double>(key, val);
    else if (key == "out") c.output = val;
    else if (key == "format") c.format = val;
    else if (key == "threads") c.threads = parse_number<unsigned>(key, val);
    else throw UsageError(key, "unknown key");
  }
  return c;
}

CoordinateSet parse_set_descriptor(std::string_view text, std::size_t n) {
  Cursor cur{text};
  if (text.starts_with("cap:")) {
    cur.expect("cap:T=");
    const std::size_t at = cur.pos;
    const double t = cur.number();
    if (!cur.done()) cur.fail("trailing characters");
    if (!(t >= -1.0 && t <= 1.0)) {
      cur.pos = at;
      cur.fail("threshold must lie in [-1, 1]");
    }
    return CoordinateSet::cap(t);
  }
  if (text.starts_with("measure-cap:")) {
    cur.expect("measure-cap:sigma=");
    const std::size_t at = cur.pos;
    const double sigma = cur.number();
    if (!cur.done()) cur.fail("trailing characters");
    if (!(sigma > 0.0 && sigma < 1.0)) {
      cur.pos = at;
      cur.fail("sigma must lie in (0, 1)");
    }
    return CoordinateSet::cap(cap_threshold_for_measure(n, sigma));
  }
  if (text.starts_with("box:")) {
    cur.expect("box:");
    Box box;
    for (;;) {
      cur.expect("[");
      const double lo = cur.number();
      cur.expect(",");
      const double hi = cur.number();
      if (!(lo <= hi)) cur.fail("interval with lo > hi");
      cur.expect("]");
      box.push_back({lo, hi});
      if (cur.done()) break;
      cur.expect("x");
    }
    return CoordinateSet::box(std::move(box));
  }
  cur.fail("expected 'cap:', 'box:' or 'measure-cap:'");
}

ExperimentReport run(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig c = resolved(config);
  constants_of(c).validate();

  const std::string& e = c.experiment;
  Out o;
  if (e == "spectra") o = spectra(c);
  else if (e == "coarea") o = coarea(c);
  else if (e == "theorem1") o = theorem(c, false);
  else if (e == "conjecture") o = theorem(c, true);
  else if (e == "smallball") o = smallball(c);
  else if (e == "tailbound") o = tailbound(c);
  else if (e == "vsp") o = vsp(c);
  else if (e == "rectangle") o = rectangle(c);
  else o = suite(c);

  ExperimentReport r;
  r.experiment = e;
  r.params = params_of(c);
  r.seed = c.seed;
  r.estimates = std::move(o.m);
  r.pass = o.pass;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_json(const ExperimentReport& r, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["seed"] = r.seed;
  j["estimates"] = nlohmann::ordered_json::array();
  for (const auto& m : r.estimates) j["estimates"].push_back({{"name", m.name}, {"value", m.value}, {"stderr", m.std_error}});
  j["pass"] = r.pass;
  if (include_wall_time) j["wall_time_s"] = r.wall_time_s;
  return j.dump(2) + "\n";
}

std::string to_csv(const ExperimentReport& r) {
  auto param = [&](const std::string& key) {
    for (const auto& [k, v] : r.params)
      if (k == key) return v;
    return std::string();
  };
  std::ostringstream s;
  s << "experiment,name,value,stderr,n,k,seed\n";
  for (const auto& m : r.estimates)
    s << r.experiment << ',' << m.name << ',' << real(m.value) << ',' << real(m.std_error) << ',' << param("n") << ','
      << param("k") << ',' << r.seed << '\n';
  return s.str();
}

}  // namespace sphlab
