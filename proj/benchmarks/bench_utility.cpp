#include <benchmark/benchmark.h>

#include "signrec/rng.hpp"
#include "signrec/utility.hpp"

using namespace signrec;

namespace {

Lexicon random_lexicon(int signs, int types, int cardinality, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PhonemeType> type_list(types);
  for (int t = 0; t < types; ++t) {
    type_list[t].id = t;
    type_list[t].name = "t" + std::to_string(t);
    for (int v = 0; v < cardinality; ++v)
      type_list[t].value_names.push_back("v" + std::to_string(100 + v));
  }
  std::vector<Sign> sign_list(signs);
  for (int s = 0; s < signs; ++s) {
    sign_list[s].gloss = "g" + std::to_string(s);
    for (int t = 0; t < types; ++t)
      sign_list[s].phonemes.push_back(static_cast<int>(rng.uniform_int(cardinality)));
  }
  return Lexicon(PhonemeInventory(std::move(type_list)), std::move(sign_list));
}

}  // namespace

static void BM_ComputeUtility(benchmark::State& state) {
  const Lexicon lex = random_lexicon(static_cast<int>(state.range(0)), 16, 6, 1);
  const auto subsets = all_subsets_of_size(16, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_utility(lex, subsets[i % subsets.size()]));
    ++i;
  }
}
BENCHMARK(BM_ComputeUtility)->Arg(100)->Arg(1000)->Arg(2723);

static void BM_SelectExact(benchmark::State& state) {
  const Lexicon lex = random_lexicon(500, 16, 6, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        select_optimal_subset(lex, static_cast<int>(state.range(0)),
                              SelectMethod::Exact));
}
BENCHMARK(BM_SelectExact)->Arg(1)->Arg(2)->Arg(3);

static void BM_SelectGreedy(benchmark::State& state) {
  const Lexicon lex = random_lexicon(500, 16, 6, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        select_optimal_subset(lex, static_cast<int>(state.range(0)),
                              SelectMethod::Greedy));
}
BENCHMARK(BM_SelectGreedy)->Arg(2)->Arg(8)->Arg(16);

static void BM_SubsetEnumeration(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(all_subsets_of_size(16, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SubsetEnumeration)->Arg(2)->Arg(8);
