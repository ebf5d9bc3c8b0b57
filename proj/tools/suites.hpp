#pragma once

#include <cstdint>
#include <string>

#include "report.hpp"

namespace nortower::cli {

struct SuiteOptions {
  std::size_t cap = 20;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  // Directory holding frozen regression data; empty disables those checks.
  std::string fixtures;
};

// Names accepted by run_suite.
bool known_suite(const std::string& name);
// Fills `report`; library errors on malformed input propagate to the caller.
void run_suite(const std::string& name, const std::string& text, const std::string& file,
               const SuiteOptions& options, Report& report);

}  // namespace nortower::cli
