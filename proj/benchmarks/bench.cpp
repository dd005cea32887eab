#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "semdrift/breadth.hpp"
#include "semdrift/collocates.hpp"
#include "semdrift/embedding.hpp"
#include "semdrift/random.hpp"
#include "semdrift/stats.hpp"

namespace sd = semdrift;

static void BM_MeanPairwiseDistance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<sd::EmbeddingVector> vs;
  for (int i = 0; i < n; ++i) {
    vs.emplace_back(sd::StubProvider::project("s" + std::to_string(i), 384, 1));
  }
  for (auto _ : state) benchmark::DoNotOptimize(sd::mean_pairwise_distance(vs));
  state.SetItemsProcessed(state.iterations() * n * (n - 1) / 2);
}
BENCHMARK(BM_MeanPairwiseDistance)->Arg(50)->Arg(200);

static void BM_CollocateCounter(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<sd::LemmaSentence> corpus(10000);
  for (auto& s : corpus) {
    s.year = 1970 + static_cast<int>(rng() % 47);
    s.lemmas.resize(8 + rng() % 25);
    for (auto& w : s.lemmas) {
      w = rng() % 20 == 0 ? "mental_health" : "w" + std::to_string(rng() % 5000);
    }
  }
  for (auto _ : state) {
    sd::CollocateCounter counter({"mental_health", "mental_illness"}, 5);
    for (const auto& s : corpus) counter.add(s);
    benchmark::DoNotOptimize(counter.counts("mental_health").grand_total());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(corpus.size()));
}
BENCHMARK(BM_CollocateCounter);

static void BM_FitTrend(benchmark::State& state) {
  sd::Rng rng(9);
  sd::IndexSeries s;
  for (int y = 1970; y <= 2016; ++y) s.points.push_back({y, sd::standard_normal(rng), 1, false});
  sd::stats::TrendOptions opts;
  opts.dw_permutations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sd::stats::fit_trend(s, sd::stats::TrendModel::kQuadratic, opts));
  }
}
BENCHMARK(BM_FitTrend)->Arg(1000)->Arg(10000);

static void BM_Ols(benchmark::State& state) {
  sd::Rng rng(3);
  std::vector<double> x(47), y(47);
  for (int i = 0; i < 47; ++i) {
    x[i] = i;
    y[i] = 0.1 * i + sd::standard_normal(rng);
  }
  std::vector<std::vector<double>> cols{x};
  const auto d = sd::stats::make_design(cols, {"year"});
  const Eigen::VectorXd yv = Eigen::Map<Eigen::VectorXd>(y.data(), 47);
  for (auto _ : state) benchmark::DoNotOptimize(sd::stats::ols_fit(yv, d));
}
BENCHMARK(BM_Ols);
BENCHMARK_MAIN();
