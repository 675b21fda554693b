#include "commands.hpp"
#include "fixtures.hpp"

#include "nsdp/cq.hpp"
#include "nsdp/linalg.hpp"
#include "nsdp/solvers.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace nsdp;

SymMat random_sym(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = nd(rng);
  return SymMat::from_upper(a + a.transpose());
}

void BM_Jacobi(benchmark::State& state) {
  const SymMat s = random_sym(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(s));
}
BENCHMARK(BM_Jacobi)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_ProjPsd(benchmark::State& state) {
  const SymMat s = random_sym(static_cast<int>(state.range(0)), 11);
  for (auto _ : state) benchmark::DoNotOptimize(proj_psd(s));
}
BENCHMARK(BM_ProjPsd)->Arg(2)->Arg(8)->Arg(32);

const std::vector<cli::Fixture>& fixtures() {
  static const auto all = cli::builtin_fixtures();
  return all;
}

void BM_CheckCq(benchmark::State& state, const char* name, CqKind kind) {
  const cli::Fixture& f = *cli::find_fixture(fixtures(), name);
  const NsdpProblem p = f.problem();
  const CqOptions opt = f.cq_options({});
  for (auto _ : state) benchmark::DoNotOptimize(check_cq(p, f.point(), kind, opt));
}
BENCHMARK_CAPTURE(BM_CheckCq, ex32_weak_crcq, "ex-3.2", CqKind::WeakCrcq)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CheckCq, ex31_weak_cpld, "ex-3.1", CqKind::WeakCpld)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CheckCq, ex41_seq_crcq, "ex-4.1", CqKind::SeqCrcq)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CheckCq, ex43_msr, "ex-4.3", CqKind::Msr)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state, const char* name, const char* solver) {
  const cli::Fixture& f = *cli::find_fixture(fixtures(), name);
  const NsdpProblem p = f.problem();
  const cli::RunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cli::run_solver(solver, p, f.start(), cfg));
}
BENCHMARK_CAPTURE(BM_Solve, ex42_al, "ex-4.2", "al")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, ex31_al, "ex-3.1", "al")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, ex42_sqp, "ex-4.2", "sqp")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
