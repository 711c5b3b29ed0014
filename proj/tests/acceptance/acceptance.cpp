#include <cstdio>
#include <filesystem>

#include "thinfilm/lab/suites.hpp"

int main(int argc, char** argv) {
  thinfilm::lab::SuiteOptions opts;
  opts.archive_dir = argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::path("acceptance-artifacts");
  thinfilm::lab::AcceptanceBattery battery(opts);
  const auto results = battery.all();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %d: %s -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str());
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
