#include <cstdio>
#include <cstdlib>
#include <string>

#include "tcl/acceptance.hpp"

// Prints one PASS/FAIL line per check; exits nonzero if any check fails.
// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
  tcl::acceptance::SuiteOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  opt.on_result = [](const tcl::acceptance::CheckResult& r) {
    std::printf("%s\n", tcl::acceptance::format_result(r).c_str());
    std::fflush(stdout);
  };
  const auto results = tcl::acceptance::run_suite(opt);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
