// Experiment runner. Exit status: 0 when the report passes, 1 when it does
// not, 2 for usage errors, 3 for hypothesis violations or other failures.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sphlab/errors.hpp"
#include "sphlab/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sphlab::UsageError("config", "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sphere concentration experiments"};
  sphlab::ExperimentConfig flags;
  std::string config_path;
  double rho = 0, alpha1 = 0, alpha2 = 0;

  std::string names;
  for (const auto& n : sphlab::experiment_names()) names += (names.empty() ? "" : " | ") + n;
  auto* exp = app.add_option("experiment", flags.experiment, names);
  auto* n = app.add_option("--n", flags.n, "ambient dimension (even)");
  auto* k = app.add_option("--k", flags.k, "number of coordinates");
  auto* trials = app.add_option("--trials", flags.trials, "independent draws");
  auto* samples = app.add_option("--samples", flags.samples, "Monte Carlo samples or net size");
  auto* seed = app.add_option("--seed", flags.seed, "master seed");
  auto* set = app.add_option("--set", flags.set_family, "cap:T=<x> | box:[a,b]x[c,d]... | measure-cap:sigma=<s>");
  auto* o_rho = app.add_option("--rho", rho, "small-ball radius constant");
  auto* o_a1 = app.add_option("--alpha1", alpha1, "coordinate budget constant");
  auto* o_a2 = app.add_option("--alpha2", alpha2, "exponential rate constant");
  auto* out = app.add_option("--out", flags.output, "report path (default stdout)");
  auto* format = app.add_option("--format", flags.format, "json | csv");
  auto* threads = app.add_option("--threads", flags.threads, "worker threads (results do not depend on it)");
  app.add_option("--config", config_path, "key = value file; flags override it");
  CLI11_PARSE(app, argc, argv);

  try {
    sphlab::ExperimentConfig cfg = config_path.empty() ? sphlab::ExperimentConfig{}
                                                       : sphlab::parse_config_text(slurp(config_path));
    if (exp->count()) cfg.experiment = flags.experiment;
    if (n->count()) cfg.n = flags.n;
    if (k->count()) cfg.k = flags.k;
    if (trials->count()) cfg.trials = flags.trials;
    if (samples->count()) cfg.samples = flags.samples;
    if (seed->count()) cfg.seed = flags.seed;
    if (set->count()) cfg.set_family = flags.set_family;
    if (o_rho->count()) cfg.rho = rho;
    if (o_a1->count()) cfg.alpha1 = alpha1;
    if (o_a2->count()) cfg.alpha2 = alpha2;
    if (out->count()) cfg.output = flags.output;
    if (format->count()) cfg.format = flags.format;
    if (threads->count()) cfg.threads = flags.threads;

    const auto report = sphlab::run(cfg);
    const std::string text = cfg.format == "csv" ? sphlab::to_csv(report) : sphlab::to_json(report);
    if (cfg.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.output);
      if (!f) throw sphlab::UsageError("out", "cannot write " + cfg.output);
      f << text;
    }
    return report.pass ? 0 : 1;
  } catch (const sphlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const sphlab::HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
