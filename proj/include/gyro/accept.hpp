#pragma once

#include <string>
#include <vector>

namespace gyro {

/// One verification criterion of the acceptance gate.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string out_dir = "acceptance_out";
  int threads = 0;
  int only = 0;  // 0 = run all
};

/// Run the acceptance suite, printing one pass/fail line per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// True when every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace gyro
