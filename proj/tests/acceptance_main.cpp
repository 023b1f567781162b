#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "scatterlab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scatterlab acceptance suite"};
  std::vector<int> ids;
  scatterlab::AcceptanceOptions options;
  std::string report;
  app.add_option("--criterion", ids, "criterion ids (default: all)")->check(CLI::Range(1, scatterlab::kCriterionCount));
  app.add_option("--seed", options.seed, "base seed");
  app.add_option("--workers", options.workers, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--report", report, "write the JSON report here");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty()) {
    for (int k = 1; k <= scatterlab::kCriterionCount; ++k) ids.push_back(k);
  }
  options.progress = [](int id, bool passed, double seconds) {
    std::fprintf(stderr, "criterion %d %s in %.1f s\n", id, passed ? "passed" : "failed", seconds);
  };
  const auto results = scatterlab::run_acceptance(ids, options);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << scatterlab::summary_line(r) << '\n';
    ok = ok && r.passed();
  }
  if (!report.empty()) scatterlab::write_text_file(report, scatterlab::acceptance_report(results, options).dump(2) + "\n");
  return ok ? 0 : 1;
}
