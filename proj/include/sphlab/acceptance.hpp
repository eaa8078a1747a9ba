#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sphlab {

struct Metric {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  std::vector<Metric> metrics;
  /// FNV-1a over the bit patterns of every number the criterion computed.
  std::uint64_t digest = 0;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

inline constexpr int kCriterionCount = 20;

std::string_view criterion_title(int id);

/// Runs one criterion (1..20). Criterion i draws from RngStream(seed).split(i).
CriterionResult run_criterion(int id, const SuiteOptions& options);

/// Runs criteria 1..20 in order; `on_result` (if set) sees each result as it completes.
std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

/// Accumulates a digest of doubles and integers.
class Digest {
 public:
  void add(double x);
  void add(std::uint64_t x);
  void add(const std::vector<double>& xs);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace sphlab
