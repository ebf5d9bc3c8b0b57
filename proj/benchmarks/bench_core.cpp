#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "nortower/descriptors.hpp"
#include "nortower/group_g.hpp"
#include "nortower/normalizer.hpp"
#include "nortower/powis.hpp"
#include "nortower/random.hpp"

namespace nortower {
namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(NORTOWER_FIXTURE_DIR) + "/" + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Poset poset(const std::string& name) { return validate_poset(parse_poset(fixture(name))); }

void BM_MultiplyMasks(benchmark::State& state) {
  const GroupG g(enumerate_gens(poset("w23.poset")));
  const Mask full = (Mask{1} << g.universe().size()) - 1;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(g.multiply_masks(rng.next() & full, rng.next() & full));
}
BENCHMARK(BM_MultiplyMasks);

void BM_NormalizeWord(benchmark::State& state) {
  const GroupG g(enumerate_gens(poset("w23.poset")));
  const std::size_t n = g.universe().size();
  Rng rng(2);
  std::vector<GenId> word(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    for (auto& x : word) x = static_cast<GenId>(rng.below(n));
    benchmark::DoNotOptimize(g.from_word(word));
  }
}
BENCHMARK(BM_NormalizeWord)->Arg(8)->Arg(32)->Arg(128);

void BM_CosetKey(benchmark::State& state) {
  const GroupG g(enumerate_gens(make_chain(4), 64), 64);
  const std::size_t n = g.universe().size();
  Rng rng(3);
  std::vector<GenId> word(16);
  for (auto _ : state) {
    for (auto& x : word) x = static_cast<GenId>(rng.below(n));
    benchmark::DoNotOptimize(g.coset_key(g.from_word(word)));
  }
}
BENCHMARK(BM_CosetKey);

void BM_TowerKFast(benchmark::State& state) {
  const Poset p = poset(state.range(0) == 0 ? "chain.poset" : "w13.poset");
  for (auto _ : state) benchmark::DoNotOptimize(tower_k_fast(p).tower.length);
}
BENCHMARK(BM_TowerKFast)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NormalizerW23(benchmark::State& state) {
  const GroupG g(enumerate_gens(poset("w23.poset")));
  const GTable table(g);
  const Subgroup level = table.level(0);
  for (auto _ : state) benchmark::DoNotOptimize(normalizer(table, level).size);
}
BENCHMARK(BM_NormalizerW23)->Unit(benchmark::kMillisecond);

void BM_Reduce(benchmark::State& state) {
  const TypeCatalog catalog = enumerate_qf_types(3);
  Rng rng(4);
  for (auto _ : state) {
    const QfType& p = catalog.types[rng.below(catalog.types.size())].type;
    benchmark::DoNotOptimize(reduce(random_descriptor2(p, rng, 3, 3), p));
  }
}
BENCHMARK(BM_Reduce);

void BM_DeltaCompat(benchmark::State& state) {
  const Powis s = load_powis(fixture("diamond.powis"));
  for (auto _ : state) benchmark::DoNotOptimize(check_delta_compat(s, 100, 5).points);
}
BENCHMARK(BM_DeltaCompat)->Unit(benchmark::kMillisecond);

void BM_CheckLimit(benchmark::State& state) {
  const BuiltSystem b = build_from_functions(parse_funcs(fixture("theta3.funcs")));
  for (auto _ : state) benchmark::DoNotOptimize(check_limit(b.system, b.limit).threads);
}
BENCHMARK(BM_CheckLimit);

}  // namespace
}  // namespace nortower

BENCHMARK_MAIN();
