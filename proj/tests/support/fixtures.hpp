#pragma once

#include <string>
#include <vector>

#include "nortower/poset.hpp"

namespace nortower::testing {

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);
Poset load_poset(const std::string& name);

struct NamedPoset {
  std::string name;
  Poset poset;
};

// chain a<b, antichain-3, W(1,2), W(1,3) and five seeded random posets,
// each with at most 12 generators.
std::vector<NamedPoset> table_fixtures();

}  // namespace nortower::testing
