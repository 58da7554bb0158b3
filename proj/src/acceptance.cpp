#include "aclab/acceptance.hpp"

#include <stdexcept>

namespace aclab {

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> kCriteria;
  return kCriteria;
}

CriterionResult run_criterion(int id) {
  for (const auto& c : acceptance_criteria())
    if (c.id == id) return c.run();
  throw std::invalid_argument("unknown criterion id");
}

}  // namespace aclab
