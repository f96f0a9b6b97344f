#include <benchmark/benchmark.h>

#include "btd/gf.hpp"
#include "btd/minors.hpp"

namespace {

btd::Tensor3<double> bench_tensor(int n) {
  auto d = btd::random_btd<double>(n, n, n, {2, 3, 4}, 1);
  return btd::compose(d);
}

void BM_Q2Serial(benchmark::State& st) {
  auto t = bench_tensor(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(btd::build_Q2_serial(t).data());
}

void BM_Q2Parallel(benchmark::State& st) {
  auto t = bench_tensor(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(btd::build_Q2(t).data());
}

btd::GFMatrix bench_gf_matrix(const btd::GFField& f, int n) {
  btd::Rng rng(3);
  return btd::gf_random(f, n, n, rng);
}

void BM_GFRankSerial(benchmark::State& st) {
  auto f = btd::GFField::binary();
  auto m = bench_gf_matrix(f, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(btd::gf_rank_serial(f, m));
}

void BM_GFRankParallel(benchmark::State& st) {
  auto f = btd::GFField::binary();
  auto m = bench_gf_matrix(f, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(btd::gf_rank(f, m));
}

}  // namespace

BENCHMARK(BM_Q2Serial)->Arg(8)->Arg(12)->Arg(16);
BENCHMARK(BM_Q2Parallel)->Arg(8)->Arg(12)->Arg(16);
BENCHMARK(BM_GFRankSerial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_GFRankParallel)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
