#pragma once

#include <string>
#include <vector>

namespace tvd {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
};

/// Run the full acceptance suite at desk scale. Each criterion is independent
/// and reports one pass/fail result; tolerances are pinned in the
/// implementation, not configurable.
std::vector<CriterionResult> run_acceptance(unsigned seed);

}  // namespace tvd
