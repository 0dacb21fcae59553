// Serial vs OpenMP timings of the data-parallel kernels on a synthetic matrix roughly a third
// the size of MovieLens 1M. Run with --benchmark_counters_tabular=true for a compact table.

#include <benchmark/benchmark.h>

#include <random>

#include "recaudit/kernels.hpp"

using namespace recaudit;

namespace {

constexpr std::size_t kUsers = 2000;
constexpr std::size_t kItems = 1500;
constexpr std::size_t kCategories = 18;

// Power-law item popularity, 40-120 interactions per user.
const TrainingMatrix& matrix() {
  static const TrainingMatrix m = [] {
    std::mt19937_64 rng(1);
    std::vector<double> pop(kItems);
    for (std::size_t i = 0; i < kItems; ++i) pop[i] = 1.0 / std::pow(static_cast<double>(i + 1), 0.8);
    std::discrete_distribution<std::uint32_t> item(pop.begin(), pop.end());
    std::uniform_int_distribution<int> len(40, 120);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t u = 0; u < kUsers; ++u) {
      const int n = len(rng);
      for (int j = 0; j < n; ++j) pairs.emplace_back(u, item(rng));
    }
    return TrainingMatrix::from_pairs(kUsers, kItems, pairs);
  }();
  return m;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_CosineTopK(benchmark::State& state) {
  const auto& m = matrix();
  const auto rows = kernels::by_user(m);
  const auto cols = kernels::by_item(m);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cosine_topk(rows, cols, 50, exec_of(state)));
}

void BM_CosineTopKReference(benchmark::State& state) {
  const auto rows = kernels::by_user(matrix());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cosine_topk_reference(rows, 50));
}

void BM_AlsHalfStep(benchmark::State& state) {
  const auto& m = matrix();
  const std::size_t dim = 64;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> fixed(m.item_count() * dim), solved(m.user_count() * dim);
  for (auto& x : fixed) x = n(rng);
  const auto rows = kernels::by_user(m);
  for (auto _ : state) {
    kernels::als_half_step(rows, fixed, solved, dim, 0.01, 40.0, exec_of(state));
    benchmark::ClobberMemory();
  }
}

void BM_RecommendAll(benchmark::State& state) {
  static const auto model = [] {
    ModelConfig cfg;
    return train_userknn(matrix(), cfg);
  }();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::recommend_all(model, 20, exec_of(state)));
}

void BM_AuditRows(benchmark::State& state) {
  static const auto data = [] {
    std::mt19937_64 rng(3);
    std::gamma_distribution<double> g(0.3, 1.0);
    std::vector<PreferenceDistribution> P, Q;
    for (std::size_t u = 0; u < 6000; ++u) {
      for (auto* v : {&P, &Q}) {
        std::vector<double> w(kCategories);
        for (auto& x : w) x = g(rng) + 1e-6;
        v->push_back(normalize(w));
      }
    }
    return std::pair{P, Q};
  }();
  const auto pb = mean_distribution(data.first);
  const auto qb = mean_distribution(data.second);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::audit_rows(data.first, data.second, pb, qb, 0.01, exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_CosineTopK)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CosineTopKReference)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_AlsHalfStep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecommendAll)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AuditRows)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
