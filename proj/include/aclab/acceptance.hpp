#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aclab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> run;
};

/// The verification suite behind `aclab verify`: each criterion prints one
/// pass/fail line with its measured quantities.
const std::vector<Criterion>& acceptance_criteria();

CriterionResult run_criterion(int id);

}  // namespace aclab
