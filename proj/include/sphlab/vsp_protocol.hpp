#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sphlab/numcore/rng.hpp"
#include "sphlab/numcore/stats.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

/// Which half of the space u lies in (the instance label) or Bob's answer.
enum class Side { in_h, in_hperp };
std::string_view to_string(Side s);
/// Parses "in-H" / "in-H-perp". Throws ParseError otherwise.
Side parse_side(std::string_view text);

struct ProtocolConfig {
  std::size_t n = 128;
  std::size_t dim_e = 33;
  std::size_t net_size = 20000;
  std::size_t list_size = 64;
  unsigned quant_bits = 7;

  /// dim_e = floor(c1 sqrt(n)), quant_bits = ceil(log2 n).
  static ProtocolConfig defaults(std::size_t n, double c1 = 3.0, std::size_t net_size = 20000,
                                 std::size_t list_size = 64);
  /// ceil(log2 list_size) + ceil(log2 net_size).
  std::size_t bits_sent() const;
  /// Throws DomainError on an invalid configuration.
  void validate() const;
};

/// ceil(log2 x) for x >= 1.
std::size_t ceil_log2(std::size_t x);

struct Instance {
  UnitVector u;
  Subspace h;
  Side label;
};

/// Throws DomainError for odd n.
Instance make_instance(std::size_t n, bool in_h, RngStream& rng);

struct Quantized {
  double value;
  bool clamped;
};

/// Rounds to the nearest multiple of 2^{1-bits}, halves to even. |x| > 1 is
/// clamped first and flagged. bits must lie in [1, 15].
Quantized quantize(double x, unsigned bits);

/// Net points stored as int16 grid codes (value = code * 2^{1-bits}), row major.
class QuantizedNet {
 public:
  QuantizedNet(std::size_t dim, unsigned bits);

  void push_back(std::span<const double> point);
  std::size_t size() const { return dim_ == 0 ? 0 : codes_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  unsigned bits() const { return bits_; }
  double step() const { return step_; }
  std::vector<double> point(std::size_t j) const;
  double dot(std::size_t j, std::span<const double> x) const;
  /// Lowest index attaining the maximum inner product with x.
  std::size_t argmax(std::span<const double> x) const;
  /// Number of coordinates clamped on insertion.
  std::size_t clamped() const { return clamped_; }

 private:
  std::size_t dim_;
  unsigned bits_;
  double step_;
  std::vector<std::int16_t> codes_;
  std::size_t clamped_ = 0;
};

struct SharedEntry {
  Subspace e;
  QuantizedNet net;
};

/// One (E, net) pair: E Haar of dimension dim_e, net_size uniform points of
/// S^{n-1} cap E, quantized to quant_bits.
SharedEntry sample_shared_entry(const ProtocolConfig& cfg, RngStream& rng);

/// list_size independent entries; entry i uses rng.split(i). Immutable once built.
using SharedList = std::vector<std::shared_ptr<const SharedEntry>>;
SharedList presample_shared(const ProtocolConfig& cfg, const RngStream& rng, unsigned threads = 1);

struct AliceMessage {
  std::size_t i_hat;
  std::size_t j_hat;
};

/// i_hat uniform over the list, j_hat the argmax of the inner product with u over net i_hat.
AliceMessage alice_step(const UnitVector& u, const SharedList& shared, RngStream& rng);

/// in-H iff |Proj_H theta|^2 > |Proj_{H^perp} theta|^2; equality answers in-H-perp.
Side bob_step(const Subspace& h, std::span<const double> theta);

struct Transcript {
  std::size_t instance_id = 0;
  std::size_t i_hat = 0;
  std::size_t j_hat = 0;
  std::size_t bits_sent = 0;
  Side label = Side::in_h;
  Side answer = Side::in_h;

  bool correct() const { return label == answer; }
};

inline constexpr std::string_view kTranscriptHeader = "instance_id,i_hat,j_hat,bits,label,answer,correct";
/// `instance_id,i_hat,j_hat,bits,label,answer,correct` with correct as 0/1.
std::string to_csv_line(const Transcript& t);
/// Inverse of to_csv_line. Throws ParseError (with column position) on malformed input.
Transcript parse_transcript_line(std::string_view line);

struct ProtocolResult {
  double success_rate = 0.0;
  double std_error = 0.0;
  std::size_t bits_sent = 0;
  EventFrequency in_h;      ///< successes among in-H instances
  EventFrequency in_hperp;  ///< successes among in-H-perp instances
  std::vector<Transcript> transcripts;
};

/// Derandomized variant: every instance uses the same pre-sampled list.
/// Alice's index choice for instance i comes from rng.split(i).
ProtocolResult run_protocol(const ProtocolConfig& cfg, std::span<const Instance> instances, const SharedList& shared,
                            const RngStream& rng, unsigned threads = 1);

/// Shared-randomness variant: each instance draws fresh shared randomness.
/// Only the entry Alice selects is ever read, so only that entry is sampled.
ProtocolResult run_shared_randomness(const ProtocolConfig& cfg, std::span<const Instance> instances,
                                     const RngStream& rng, unsigned threads = 1);

/// `count` instances alternating in-H / in-H-perp; instance i uses rng.split(i).
std::vector<Instance> make_instances(std::size_t n, std::size_t count, const RngStream& rng);

/// Frequency of ||Proj_F v|^2 - l/d| >= t for Haar v on S^{d-1}, F = span(e_1..e_l).
EventFrequency projection_tail(std::size_t d, std::size_t l, double t, std::size_t trials, const RngStream& rng,
                               unsigned threads = 1);

struct NetCheck {
  bool is_half_net = false;
  std::size_t probes_checked = 0;
  double worst_probe = 1.0;  ///< smallest best inner product seen (before any early exit)
};

/// Probe oracle for the 1/2-net property of net points (unit vectors in R^d):
/// every probe z needs some p with <p, z> >= 7/8 (|p - z| <= 1/2). Stops at
/// the first uncovered probe.
NetCheck half_net_check(std::span<const std::vector<double>> net, std::size_t probes, RngStream& rng);

/// net_size uniform points of S^{d-1}.
std::vector<std::vector<double>> uniform_net(std::size_t d, std::size_t net_size, RngStream& rng);

struct NetMaxCheck {
  double net_max;     ///< max_j <theta_j, u> over the quantized net
  double projection;  ///< |Proj_E u|
};

/// Compares the net maximum against max over S cap E of <theta, u> = |Proj_E u|.
NetMaxCheck net_max_check(const SharedEntry& entry, const UnitVector& u);

}  // namespace sphlab
