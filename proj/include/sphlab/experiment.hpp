#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sphlab/acceptance.hpp"
#include "sphlab/sphere_geometry.hpp"

namespace sphlab {

/// Experiment names accepted by run().
const std::vector<std::string>& experiment_names();

/// Counts left at 0 and unset optionals take per-experiment defaults when run.
struct ExperimentConfig {
  std::string experiment = "suite";
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::string set_family;  ///< descriptor; see parse_set_descriptor
  std::optional<double> rho;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::string output;  ///< report path; empty means stdout
  std::string format = "json";
  unsigned threads = 1;
};

/// Throws UsageError naming the offending field.
void validate(const ExperimentConfig& config);

/// `key = value` lines with the CLI flag names as keys. Doubles are written
/// with 17 significant digits so parsing the text gives back the same config.
std::string to_config_text(const ExperimentConfig& config);
/// Blank lines and lines starting with '#' are skipped. Throws UsageError for
/// unknown keys or bad values.
ExperimentConfig parse_config_text(std::string_view text);

/// Grammar: `cap:T=<real>` | `box:[a,b]x[c,d]...` | `measure-cap:sigma=<real>`.
/// measure-cap solves for the threshold of a cap of measure sigma on S^{n-1}.
/// Throws ParseError with the 0-based position of the offending character.
CoordinateSet parse_set_descriptor(std::string_view text, std::size_t n);

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;  ///< resolved configuration, in key order
  std::uint64_t seed = 0;
  std::vector<Metric> estimates;
  bool pass = false;
  double wall_time_s = 0.0;
};

/// Validates, fills defaults, runs. Hypothesis violations propagate as
/// HypothesisViolation with the constraint in the message.
ExperimentReport run(const ExperimentConfig& config);

/// `{experiment, params:{...}, seed, estimates:[{name, value, stderr}], pass, wall_time_s}`.
std::string to_json(const ExperimentReport& report, bool include_wall_time = true);
/// Header `experiment,name,value,stderr,n,k,seed` and one row per estimate.
std::string to_csv(const ExperimentReport& report);

}  // namespace sphlab
