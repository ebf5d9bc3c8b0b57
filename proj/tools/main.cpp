// nortower: rank, tower, verify and construct front end.
// Exit codes: 0 pass, 1 verification failure, 2 input or usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nortower/error.hpp"
#include "nortower/group_k.hpp"
#include "nortower/normalizer.hpp"
#include "nortower/poset.hpp"
#include "nortower/powis.hpp"
#include "report.hpp"
#include "suites.hpp"

namespace nortower::cli {
namespace {

constexpr int kPass = 0, kFail = 1, kInput = 2;
// Largest K table the brute-force K tower will build, as log2 of its order.
constexpr std::size_t kMaxKTableLog2 = 22;

std::string read_input(const std::string& file, const std::string& fixtures) {
  std::filesystem::path path(file);
  if (!std::filesystem::exists(path) && !fixtures.empty()) path = std::filesystem::path(fixtures) / file;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + file);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int cmd_rank(const std::string& text) {
  const Poset p = validate_poset(parse_poset(text));
  const RankInfo r = rank(p);
  Report report;
  for (ElemId t = 0; t < p.size(); ++t) report.set("rk[" + p.name(t) + "]", r.rk[t]);
  report.set("rkI", r.rk_of_poset);
  for (std::size_t a = 0; a < r.levels.size(); ++a) {
    std::string names;
    for (ElemId t : r.levels[a]) names += (names.empty() ? "" : ",") + p.name(t);
    report.set("level[" + std::to_string(a) + "]", names);
  }
  report.print(std::cout);
  return kPass;
}

void put_tower(const TowerReport& t, Report& report) {
  report.set("tau", t.length);
  if (t.expected) {
    report.set("expected", *t.expected);
    report.set("match", t.match());
  }
  report.set("reaches_ambient", t.reaches_ambient);
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    const std::string key = "level[" + std::to_string(i) + "]";
    report.set(key + ".label", t.levels[i].label);
    report.set(key + ".log2", t.levels[i].log2_size);
  }
}

int cmd_tower(const std::string& text, const std::string& side, const std::string& method, std::size_t cap) {
  const Poset p = validate_poset(parse_poset(text));
  Report report;
  report.set("side", side);
  report.set("method", method);
  if (side == "k" && method == "fast") {
    put_tower(tower_k_fast(p, cap).tower, report);
  } else if (side == "k") {
    const GroupG g(enumerate_gens(p, cap), cap);
    const GroupK k(g);
    if (g.universe().size() + (std::size_t{1} << g.coset_count_log2()) > kMaxKTableLog2)
      throw Error(ErrorKind::UniverseTooLarge, "K table too large for the brute-force tower");
    const KTable table(k);
    put_tower(tower(table, table.h_subgroup(), 64), report);
  } else if (method == "brute") {
    const GroupG g(enumerate_gens(p, cap), cap);
    const GTable table(g);
    put_tower(tower(table, table.level(0), 64), report);
  } else {
    throw Error(ErrorKind::InvalidArgument, "the fast method is available on the K side only");
  }
  report.print(std::cout);
  return kPass;
}

int cmd_verify(const std::string& suite, const std::string& file, const SuiteOptions& options) {
  if (!known_suite(suite)) throw Error(ErrorKind::InvalidArgument, "unknown suite " + suite);
  Report report;
  run_suite(suite, read_input(file, options.fixtures), file, options, report);
  report.print(std::cout);
  return report.failed() ? kFail : kPass;
}

int cmd_construct(const std::string& text, const std::string& out, bool pad) {
  const BuiltSystem b = build_from_functions(parse_funcs(text), BuildOptions{pad});
  const std::string system = format_powis(b.system);
  // The emitted text must load back to the same system.
  if (!(load_powis(system) == b.system)) throw Error(ErrorKind::InvariantViolation, "round trip failed");
  const LimitReport l = check_limit(b.system, b.limit);
  Report report;
  report.set("family", b.family.size());
  report.set("nodes", b.system.size());
  if (l.max_u_st) report.set("max_u_st", b.system.name(*l.max_u_st));
  for (const auto& c : l.clauses) {
    const std::string name = std::string("clause_") + c.clause;
    if (!c.holds) report.set(name + ".witness", c.witness);
    report.check(name, c.holds, "limit clause " + std::string(1, c.clause) + " on the constructed system");
  }
  if (out.empty()) {
    std::cout << system;
    report.print(std::cerr);
  } else {
    std::ofstream file(out);
    if (!(file << system)) throw Error(ErrorKind::InvalidArgument, "cannot write " + out);
    report.set("output", out);
    report.print(std::cout);
  }
  return report.failed() ? kFail : kPass;
}

}  // namespace
}  // namespace nortower::cli

int main(int argc, char** argv) {
  using namespace nortower;
  using namespace nortower::cli;

  CLI::App app{"Normalizer towers over partial-order systems"};
  app.require_subcommand(1);
  app.fallthrough();
  SuiteOptions options;
  app.add_option("--cap", options.cap, "Generator cap for group construction")->capture_default_str();
  app.add_option("--seed", options.seed, "Seed for sampled checks")->capture_default_str();
  app.add_option("--samples", options.samples, "Sample count for sampled checks")->capture_default_str();
  app.add_option("--fixtures", options.fixtures, "Directory with frozen regression data");

  std::string file, side = "k", method = "fast", suite, out;
  bool no_pad = false;

  auto* rank_cmd = app.add_subcommand("rank", "Element ranks and rank levels of a poset");
  rank_cmd->add_option("file", file, "Poset file")->required();

  auto* tower_cmd = app.add_subcommand("tower", "Normalizer tower of a poset's group");
  tower_cmd->add_option("file", file, "Poset file")->required();
  tower_cmd->add_option("--side", side, "g or k")->check(CLI::IsMember({"g", "k"}))->capture_default_str();
  tower_cmd->add_option("--method", method, "brute or fast")
      ->check(CLI::IsMember({"brute", "fast"}))
      ->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite on an input file");
  verify_cmd->add_option("suite", suite, "tables, normalizer, ktower, equivalence, support, powis, limit or exlimit")->required();
  verify_cmd->add_option("file", file, "Input file")->required();

  auto* construct_cmd = app.add_subcommand("construct", "Build a system from a function family");
  construct_cmd->add_option("file", file, "Function family file")->required();
  construct_cmd->add_option("-o,--out", out, "Write the system here; stdout otherwise");
  construct_cmd->add_flag("--no-pad", no_pad, "Use the family as given");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*rank_cmd) return cmd_rank(read_input(file, options.fixtures));
    if (*tower_cmd) return cmd_tower(read_input(file, options.fixtures), side, method, options.cap);
    if (*verify_cmd) return cmd_verify(suite, file, options);
    return cmd_construct(read_input(file, options.fixtures), out, !no_pad);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.detail() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}
