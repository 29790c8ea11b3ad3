#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace voipqoe {

/// One recomputed quantity compared against its published value or band.
struct ReproductionCheck {
  std::string label;
  double computed = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool pass = false;
};

/// Recomputation of one published artifact.
struct Reproduction {
  std::string target;
  /// Human-readable table or CSV blocks.
  std::string rendered;
  std::vector<ReproductionCheck> checks;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Targets: "table3", "table4", "table6", "table7", "fig6". Throws
/// std::invalid_argument for anything else.
Reproduction reproduce(const std::string& target);

std::vector<std::string> reproduction_targets();

}  // namespace voipqoe
