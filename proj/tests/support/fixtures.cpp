#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nortower/chains.hpp"

namespace nortower::testing {

std::string fixture_path(const std::string& name) {
  return std::string(NORTOWER_FIXTURE_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Poset load_poset(const std::string& name) {
  return validate_poset(parse_poset(read_file(fixture_path(name))));
}

std::vector<NamedPoset> table_fixtures() {
  std::vector<NamedPoset> out{
      {"chain", load_poset("chain.poset")},
      {"antichain3", load_poset("antichain3.poset")},
      {"w12", load_poset("w12.poset")},
      {"w13", load_poset("w13.poset")},
  };
  int found = 0;
  for (std::uint64_t seed = 1; found < 5; ++seed) {
    Poset p = random_poset(seed, 4 + seed % 2, 0.4);
    if (p.lt_pairs().empty() || count_gens(p) > 12) continue;
    out.push_back({"random" + std::to_string(seed), std::move(p)});
    ++found;
  }
  return out;
}

}  // namespace nortower::testing
