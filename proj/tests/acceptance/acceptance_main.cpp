// One line per criterion. Exit status is 0 only if every selected criterion passes.
#include <CLI11.hpp>

#include <cstdio>
#include <vector>

#include "sphlab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> only;
  sphlab::SuiteOptions opt;
  bool verbose = false;
  app.add_option("--only", only, "criterion ids to run (default: all)")->check(CLI::Range(1, sphlab::kCriterionCount));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "print metrics");
  CLI11_PARSE(app, argc, argv);

  if (only.empty())
    for (int i = 1; i <= sphlab::kCriterionCount; ++i) only.push_back(i);

  int failed = 0;
  for (int id : only) {
    const auto r = sphlab::run_criterion(id, opt);
    std::printf("[%s] criterion %2d: %s | %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.detail.c_str(), r.seconds);
    if (verbose)
      for (const auto& m : r.metrics) std::printf("    %-28s %.10g +- %.3g\n", m.name.c_str(), m.value, m.std_error);
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", only.size(), failed);
  return failed == 0 ? 0 : 1;
}
