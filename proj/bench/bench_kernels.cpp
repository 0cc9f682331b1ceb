// Serial reference vs OpenMP kernels on a golden-ratio norm table.

#include <benchmark/benchmark.h>

#include <numeric>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"
#include "pscat/spectrum.hpp"

namespace {

const pscat::NormTable& table() {
  static const pscat::NormTable t =
      pscat::build_norm_table(pscat::TorusGeometry::from_spec("golden"), 2e5);
  return t;
}

pscat::Exec exec_of(const benchmark::State& s) {
  return s.range(0) ? pscat::Exec::parallel : pscat::Exec::serial;
}

void BM_PairCount(benchmark::State& state) {
  const auto& t = table();
  const double X = 1e5;
  for (auto _ : state) {
    auto c = exec_of(state) == pscat::Exec::parallel
                 ? pscat::kernels::pair_count_parallel(t.norms(), t.multiplicities(), X, 0.5, 1.5)
                 : pscat::kernels::pair_count_serial(t.norms(), t.multiplicities(), X, 0.5, 1.5);
    benchmark::DoNotOptimize(c);
  }
}

void BM_InverseSquare(benchmark::State& state) {
  const auto& t = table();
  std::vector<std::size_t> q(t.count_le(2e4));
  std::iota(q.begin(), q.end(), std::size_t{0});
  for (auto _ : state) {
    auto v = exec_of(state) == pscat::Exec::parallel
                 ? pscat::kernels::inverse_square_sums_parallel(t.norms(), q, 4e4)
                 : pscat::kernels::inverse_square_sums_serial(t.norms(), q, 4e4);
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_FarPairs(benchmark::State& state) {
  const auto& t = table();
  for (auto _ : state) {
    auto v = exec_of(state) == pscat::Exec::parallel
                 ? pscat::kernels::far_pair_sum_parallel(t.norms(), 2e4, 3.0)
                 : pscat::kernels::far_pair_sum_serial(t.norms(), 2e4, 3.0);
    benchmark::DoNotOptimize(v);
  }
}

void BM_Neighbours(benchmark::State& state) {
  const auto& t = table();
  for (auto _ : state) {
    auto v = exec_of(state) == pscat::Exec::parallel
                 ? pscat::kernels::neighbour_counts_parallel(t.norms(), 1e5, 3.0)
                 : pscat::kernels::neighbour_counts_serial(t.norms(), 1e5, 3.0);
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_SolveSecular(benchmark::State& state) {
  const auto& t = table();
  pscat::SolverOptions opt;
  opt.exec = exec_of(state);
  const pscat::CouplingConfig cfg{1.5707963267948966, 2e4};
  for (auto _ : state) {
    auto v = pscat::solve_new_eigenvalues(t, cfg, {0.0, 2e3}, opt);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_PairCount)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InverseSquare)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FarPairs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Neighbours)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveSecular)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
