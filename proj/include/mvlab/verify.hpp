#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mvlab/config.hpp"

namespace mvlab {

struct CriterionResult {
  std::string suite;
  std::string criterion;  ///< short description of what is asserted
  std::string measured;
  std::string threshold;
  bool passed = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  std::vector<std::pair<std::string, std::string>> details;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_passed() const noexcept;
};

/// Suite names in execution order (without "all").
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Unknown names throw ParameterError.
/// `workdir` receives scratch output of suites that exercise commands.
VerifyReport run_verification(const RunConfig& cfg, const std::string& suite, const std::filesystem::path& workdir);

}  // namespace mvlab
