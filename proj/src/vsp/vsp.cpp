#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "sphlab/errors.hpp"
#include "sphlab/numcore/linalg.hpp"
#include "sphlab/numcore/parallel.hpp"
#include "sphlab/vsp_protocol.hpp"

namespace sphlab {

std::string_view to_string(Side s) { return s == Side::in_h ? "in-H" : "in-H-perp"; }

Side parse_side(std::string_view text) {
  if (text == "in-H") return Side::in_h;
  if (text == "in-H-perp") return Side::in_hperp;
  throw ParseError("expected in-H or in-H-perp, got '" + std::string(text) + "'", 0);
}

std::size_t ceil_log2(std::size_t x) {
  if (x == 0) throw DomainError("ceil_log2: argument must be positive");
  std::size_t b = 0;
  while ((std::size_t{1} << b) < x) ++b;
  return b;
}

ProtocolConfig ProtocolConfig::defaults(std::size_t n, double c1, std::size_t net_size, std::size_t list_size) {
  ProtocolConfig c;
  c.n = n;
  c.dim_e = static_cast<std::size_t>(std::floor(c1 * std::sqrt(static_cast<double>(n))));
  c.net_size = net_size;
  c.list_size = list_size;
  c.quant_bits = static_cast<unsigned>(ceil_log2(std::max<std::size_t>(n, 2)));
  return c;
}

std::size_t ProtocolConfig::bits_sent() const { return ceil_log2(list_size) + ceil_log2(net_size); }

void ProtocolConfig::validate() const {
  if (n < 2 || n % 2 != 0) throw DomainError("ProtocolConfig: n must be even and at least 2");
  if (dim_e < 1 || dim_e > n) throw DomainError("ProtocolConfig: need 1 <= dim_e <= n");
  if (net_size < 1) throw DomainError("ProtocolConfig: net_size must be at least 1");
  if (list_size < 1) throw DomainError("ProtocolConfig: list_size must be at least 1");
  if (quant_bits < 1 || quant_bits > 15) throw DomainError("ProtocolConfig: quant_bits must lie in [1, 15]");
}

Instance make_instance(std::size_t n, bool in_h, RngStream& rng) {
  if (n < 2 || n % 2 != 0) throw DomainError("make_instance: n must be even");
  Subspace h = sample_grassmannian(n, n / 2, rng);
  const UnitVector y = sample_unit_sphere(n / 2, rng);
  std::vector<double> u = in_h ? h.embed(y.coords()) : complement(h).embed(y.coords());
  return Instance{UnitVector::normalized(std::move(u)), std::move(h), in_h ? Side::in_h : Side::in_hperp};
}

std::vector<Instance> make_instances(std::size_t n, std::size_t count, const RngStream& rng) {
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RngStream r = rng.split(i);
    out.push_back(make_instance(n, i % 2 == 0, r));
  }
  return out;
}

// Quantization

namespace {

void check_bits(unsigned bits) {
  if (bits < 1 || bits > 15) throw DomainError("quantize: bits must lie in [1, 15]");
}

// Grid code of x; nearbyint rounds half to even under the default rounding mode.
std::int16_t code_of(double x, double step, bool& clamped) {
  clamped = std::abs(x) > 1.0;
  const double c = std::clamp(x, -1.0, 1.0);
  return static_cast<std::int16_t>(std::nearbyint(c / step));
}

}  // namespace

Quantized quantize(double x, unsigned bits) {
  check_bits(bits);
  if (std::isnan(x)) throw DomainError("quantize: NaN input");
  const double step = std::ldexp(1.0, 1 - static_cast<int>(bits));
  bool clamped = false;
  const std::int16_t code = code_of(x, step, clamped);
  return {code * step, clamped};
}

QuantizedNet::QuantizedNet(std::size_t dim, unsigned bits)
    : dim_(dim), bits_(bits), step_(std::ldexp(1.0, 1 - static_cast<int>(bits))) {
  check_bits(bits);
  if (dim == 0) throw DomainError("QuantizedNet: dimension must be positive");
}

void QuantizedNet::push_back(std::span<const double> point) {
  if (point.size() != dim_) throw DomainError("QuantizedNet: point dimension mismatch");
  for (double x : point) {
    bool clamped = false;
    codes_.push_back(code_of(x, step_, clamped));
    clamped_ += clamped ? 1 : 0;
  }
}

std::vector<double> QuantizedNet::point(std::size_t j) const {
  if (j >= size()) throw DomainError("QuantizedNet: index out of range");
  std::vector<double> p(dim_);
  for (std::size_t i = 0; i < dim_; ++i) p[i] = codes_[j * dim_ + i] * step_;
  return p;
}

double QuantizedNet::dot(std::size_t j, std::span<const double> x) const {
  if (j >= size() || x.size() != dim_) throw DomainError("QuantizedNet::dot: bad index or dimension");
  double s = 0.0;
  const std::int16_t* row = codes_.data() + j * dim_;
  for (std::size_t i = 0; i < dim_; ++i) s += row[i] * x[i];
  return s * step_;
}

std::size_t QuantizedNet::argmax(std::span<const double> x) const {
  if (size() == 0) throw DomainError("QuantizedNet::argmax: empty net");
  if (x.size() != dim_) throw DomainError("QuantizedNet::argmax: dimension mismatch");
  // step > 0, so comparing raw code sums gives the same argmax.
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) {
    const std::int16_t* row = codes_.data() + j * dim_;
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += row[i] * x[i];
    if (s > best_value) {
      best_value = s;
      best = j;
    }
  }
  return best;
}

// Shared randomness

SharedEntry sample_shared_entry(const ProtocolConfig& cfg, RngStream& rng) {
  cfg.validate();
  Subspace e = sample_grassmannian(cfg.n, cfg.dim_e, rng);
  QuantizedNet net(cfg.n, cfg.quant_bits);
  for (std::size_t j = 0; j < cfg.net_size; ++j) {
    const UnitVector dir = sample_unit_sphere(cfg.dim_e, rng);
    net.push_back(e.embed(dir.coords()));
  }
  return SharedEntry{std::move(e), std::move(net)};
}

SharedList presample_shared(const ProtocolConfig& cfg, const RngStream& rng, unsigned threads) {
  cfg.validate();
  return parallel_map(cfg.list_size, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    return std::make_shared<const SharedEntry>(sample_shared_entry(cfg, r));
  });
}

AliceMessage alice_step(const UnitVector& u, const SharedList& shared, RngStream& rng) {
  if (shared.empty()) throw DomainError("alice_step: empty shared list");
  const std::size_t i = static_cast<std::size_t>(rng.below(shared.size()));
  return {i, shared[i]->net.argmax(u.coords())};
}

Side bob_step(const Subspace& h, std::span<const double> theta) {
  const double a = h.projection_norm2(theta);
  const double b = squared_norm(theta) - a;
  return a > b ? Side::in_h : Side::in_hperp;
}

// Transcripts

std::string to_csv_line(const Transcript& t) {
  std::ostringstream os;
  os << t.instance_id << ',' << t.i_hat << ',' << t.j_hat << ',' << t.bits_sent << ',' << to_string(t.label) << ','
     << to_string(t.answer) << ',' << (t.correct() ? 1 : 0);
  return os.str();
}

namespace {

std::size_t parse_count(std::string_view field, std::size_t offset) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || p != field.data() + field.size())
    throw ParseError("expected a non-negative integer", offset + static_cast<std::size_t>(p - field.data()));
  return v;
}

Side parse_side_at(std::string_view field, std::size_t offset) {
  try {
    return parse_side(field);
  } catch (const ParseError&) {
    throw ParseError("expected in-H or in-H-perp", offset);
  }
}

}  // namespace

Transcript parse_transcript_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start), start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 7) throw ParseError("transcript line needs 7 comma-separated fields", line.size());
  Transcript t;
  t.instance_id = parse_count(fields[0].first, fields[0].second);
  t.i_hat = parse_count(fields[1].first, fields[1].second);
  t.j_hat = parse_count(fields[2].first, fields[2].second);
  t.bits_sent = parse_count(fields[3].first, fields[3].second);
  t.label = parse_side_at(fields[4].first, fields[4].second);
  t.answer = parse_side_at(fields[5].first, fields[5].second);
  const auto [flag, pos] = fields[6];
  if (flag != "0" && flag != "1") throw ParseError("correct flag must be 0 or 1", pos);
  if ((flag == "1") != t.correct()) throw ParseError("correct flag disagrees with label and answer", pos);
  return t;
}

// Protocol runs

namespace {

ProtocolResult summarize(std::vector<Transcript> transcripts, std::size_t bits) {
  ProtocolResult res;
  res.bits_sent = bits;
  std::size_t hits = 0;
  for (const auto& t : transcripts) {
    EventFrequency& side = t.label == Side::in_h ? res.in_h : res.in_hperp;
    ++side.trials;
    if (t.correct()) {
      ++side.hits;
      ++hits;
    }
  }
  const Estimate e = binomial_estimate(hits, transcripts.size());
  res.success_rate = e.value;
  res.std_error = e.std_error;
  res.transcripts = std::move(transcripts);
  return res;
}

void check_instances(const ProtocolConfig& cfg, std::span<const Instance> instances) {
  cfg.validate();
  for (const auto& inst : instances)
    if (inst.u.ambient_dim() != cfg.n || inst.h.ambient_dim() != cfg.n)
      throw DomainError("run_protocol: instance dimension differs from cfg.n");
}

}  // namespace

ProtocolResult run_protocol(const ProtocolConfig& cfg, std::span<const Instance> instances, const SharedList& shared,
                            const RngStream& rng, unsigned threads) {
  check_instances(cfg, instances);
  const std::size_t bits = cfg.bits_sent();
  auto transcripts = parallel_map(instances.size(), threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    const Instance& inst = instances[i];
    const AliceMessage msg = alice_step(inst.u, shared, r);
    const auto theta = shared[msg.i_hat]->net.point(msg.j_hat);
    return Transcript{i, msg.i_hat, msg.j_hat, bits, inst.label, bob_step(inst.h, theta)};
  });
  return summarize(std::move(transcripts), bits);
}

ProtocolResult run_shared_randomness(const ProtocolConfig& cfg, std::span<const Instance> instances,
                                     const RngStream& rng, unsigned threads) {
  check_instances(cfg, instances);
  const std::size_t bits = cfg.bits_sent();
  auto transcripts = parallel_map(instances.size(), threads, [&](std::size_t i) {
    // Fresh list presample_shared(cfg, base.split(1)); Alice reads one entry of it.
    const RngStream base = rng.split(i);
    RngStream alice = base.split(0);
    const std::size_t i_hat = static_cast<std::size_t>(alice.below(cfg.list_size));
    RngStream entry_rng = base.split(1).split(i_hat);
    const SharedEntry entry = sample_shared_entry(cfg, entry_rng);
    const Instance& inst = instances[i];
    const std::size_t j_hat = entry.net.argmax(inst.u.coords());
    return Transcript{i, i_hat, j_hat, bits, inst.label, bob_step(inst.h, entry.net.point(j_hat))};
  });
  return summarize(std::move(transcripts), bits);
}

// Nets and projections

EventFrequency projection_tail(std::size_t d, std::size_t l, double t, std::size_t trials, const RngStream& rng,
                               unsigned threads) {
  if (l > d || d == 0) throw DomainError("projection_tail: need l <= d and d >= 1");
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  const double target = static_cast<double>(l) / static_cast<double>(d);
  const auto counts = parallel_map(blocks, threads, [&](std::size_t b) {
    RngStream r = rng.split(b);
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    std::size_t hits = 0;
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const UnitVector v = sample_unit_sphere(d, r);
      double p = 0.0;
      for (std::size_t j = 0; j < l; ++j) p += v.coords()[j] * v.coords()[j];
      if (std::abs(p - target) >= t) ++hits;
    }
    return hits;
  });
  EventFrequency f;
  f.trials = trials;
  for (std::size_t c : counts) f.hits += c;
  return f;
}

std::vector<std::vector<double>> uniform_net(std::size_t d, std::size_t net_size, RngStream& rng) {
  std::vector<std::vector<double>> net;
  net.reserve(net_size);
  for (std::size_t j = 0; j < net_size; ++j) {
    const UnitVector v = sample_unit_sphere(d, rng);
    net.emplace_back(v.coords().begin(), v.coords().end());
  }
  return net;
}

NetCheck half_net_check(std::span<const std::vector<double>> net, std::size_t probes, RngStream& rng) {
  if (net.empty()) throw DomainError("half_net_check: empty net");
  const std::size_t d = net.front().size();
  NetCheck out;
  out.is_half_net = true;
  for (std::size_t p = 0; p < probes; ++p) {
    const UnitVector z = sample_unit_sphere(d, rng);
    double best = -1.0;
    for (const auto& q : net) {
      best = std::max(best, dot(q, z.coords()));
      if (best >= 7.0 / 8.0) break;
    }
    ++out.probes_checked;
    out.worst_probe = std::min(out.worst_probe, best);
    if (best < 7.0 / 8.0) {
      out.is_half_net = false;
      break;
    }
  }
  return out;
}

NetMaxCheck net_max_check(const SharedEntry& entry, const UnitVector& u) {
  const std::size_t j = entry.net.argmax(u.coords());
  return {entry.net.dot(j, u.coords()), std::sqrt(entry.e.projection_norm2(u.coords()))};
}

}  // namespace sphlab
