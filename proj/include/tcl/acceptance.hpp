#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tcl::acceptance {

struct CheckResult {
  int criterion = 0;
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  std::string relation;  // how measured is compared with target: "<=", ">=", "<", ">", "=="
  bool pass = false;
  std::string note;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  int n_threads = 0;
  std::vector<int> only;  // empty: all criteria
  // Called after each check, e.g. to stream the table while the suite runs.
  std::function<void(const CheckResult&)> on_result;
};

int criterion_count();
std::string criterion_title(int criterion);

std::vector<CheckResult> run_suite(const SuiteOptions& opt = {});

// One line per check: "PASS [3] name: measured 0.123 <= 0.1 (note)".
std::string format_result(const CheckResult& r);

}  // namespace tcl::acceptance
