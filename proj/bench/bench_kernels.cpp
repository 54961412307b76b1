// Parallel kernels against their serial references, the two solvers, and
// seed precomputation. Thread-count arguments: 0 means the OpenMP default.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mlrec/dynamics.hpp"
#include "mlrec/kernels.hpp"
#include "mlrec/parallel.hpp"
#include "mlrec/sparse.hpp"

#ifdef MLREC_BENCH_PRECOMPUTE
#include "mlrec/recommender.hpp"
#include "support/fixtures.hpp"
#endif

namespace {

using namespace mlrec;

// n x n, about `per_col` entries per column.
CscMatrix random_matrix(std::size_t n, std::size_t per_col, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> row(0, n - 1);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<Triplet> t;
  t.reserve(n * per_col);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < per_col; ++k) t.push_back({row(rng), j, weight(rng)});
  }
  return CscMatrix::from_triplets(n, n, std::move(t));
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = unit(rng);
  return v;
}

void BM_SpmvParallel(benchmark::State& state) {
  const ThreadScope threads(static_cast<int>(state.range(1)));
  const std::size_t n = state.range(0);
  const CsrMatrix a = random_matrix(n, 8, 1).to_csr();
  const auto x = random_vector(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    kernels::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nnz());
}

void BM_SpmvReference(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const CsrMatrix a = random_matrix(n, 8, 1).to_csr();
  const auto x = random_vector(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    kernels::reference::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nnz());
}

void BM_L1DistanceParallel(benchmark::State& state) {
  const ThreadScope threads(static_cast<int>(state.range(1)));
  const auto x = random_vector(state.range(0), 3);
  const auto y = random_vector(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::l1_distance(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_L1DistanceReference(benchmark::State& state) {
  const auto x = random_vector(state.range(0), 3);
  const auto y = random_vector(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::l1_distance(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LincombParallel(benchmark::State& state) {
  const ThreadScope threads(static_cast<int>(state.range(1)));
  const auto x = random_vector(state.range(0), 5);
  const auto y = random_vector(state.range(0), 6);
  std::vector<double> out(x.size());
  for (auto _ : state) {
    kernels::lincomb(0.88, x, 0.12, y, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LincombReference(benchmark::State& state) {
  const auto x = random_vector(state.range(0), 5);
  const auto y = random_vector(state.range(0), 6);
  std::vector<double> out(x.size());
  for (auto _ : state) {
    kernels::reference::lincomb(0.88, x, 0.12, y, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PageRank(benchmark::State& state) {
  const ThreadScope threads(static_cast<int>(state.range(2)));
  const std::size_t n = state.range(0);
  const TransitionMatrix t = column_normalize(random_matrix(n, 8, 7));
  std::vector<double> v(n, 0.0);
  v[0] = 1.0;
  PageRankConfig c;
  c.rho = 0.12;
  c.solver = state.range(1) ? Solver::linear : Solver::power;
  for (auto _ : state) benchmark::DoNotOptimize(pagerank(t, v, c).scores.data());
  state.SetLabel(state.range(1) ? "linear" : "power");
}

BENCHMARK(BM_SpmvReference)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_SpmvParallel)->ArgsProduct({{1 << 16, 1 << 20}, {1, 0}});
BENCHMARK(BM_L1DistanceReference)->Arg(1 << 20);
BENCHMARK(BM_L1DistanceParallel)->ArgsProduct({{1 << 20}, {1, 0}});
BENCHMARK(BM_LincombReference)->Arg(1 << 20);
BENCHMARK(BM_LincombParallel)->ArgsProduct({{1 << 20}, {1, 0}});
BENCHMARK(BM_PageRank)->ArgsProduct({{1 << 14, 1 << 18}, {0, 1}, {1, 0}})->Unit(benchmark::kMillisecond);

#ifdef MLREC_BENCH_PRECOMPUTE
void BM_Precompute(benchmark::State& state) {
  const ThreadScope threads(static_cast<int>(state.range(0)));
  const testing::PlantedKg kg = testing::planted_kg(5, 40, 10);
  const SupraAdjacency g = testing::build(kg.raw);
  RecommenderConfig c;
  c.item_roles = {"movie"};
  const Recommender rec(g, uniform_salience(g.schema()), c);
  std::vector<std::string> seeds;
  for (const auto& community : kg.communities) seeds.insert(seeds.end(), community.begin(), community.begin() + 5);
  for (auto _ : state) benchmark::DoNotOptimize(precompute_seed_rankings(rec, seeds).rankings.size());
  state.SetItemsProcessed(state.iterations() * seeds.size());
}
BENCHMARK(BM_Precompute)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
#endif

}  // namespace

BENCHMARK_MAIN();
